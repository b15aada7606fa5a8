# query/executor.py
"""
Query execution entry points.

execute() streams result rows from a plan inside one read transaction;
profile() runs the same plan to completion and returns the ProfileTree.
QueryEngine ties parse -> bind -> plan -> execute together for one store and
numbers every query it runs, which seeds that query's rand() generator.
"""
import itertools
import threading
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Mapping, Optional, Tuple
import numpy as np
from storage import GraphStore
from utils.memory_tracker import MemoryTracker
from .binder import BoundQuery, bind
from .expressions import Evaluator
from .operators import ExecutionContext, ProduceResults
from .parser import get_parser
from .planner import plan as plan_query
from .profiler import ProfileTree, build_profile, render_plan
logger = logging.getLogger(__name__)
Row = Dict[str, Any]
def query_rng(seed: int, sequence: int) -> np.random.Generator:
    """Per-query generator behind rand(), derived from (global seed, query sequence number)"""
    return np.random.default_rng([int(seed), int(sequence)])
@dataclass
class QueryResult:
    columns: Tuple[str, ...]
    rows: List[Row] = field(default_factory=list)
    profile: Optional[ProfileTree] = None
    sequence: int = 0
    def records(self) -> List[tuple]:
        return [tuple(row[c] for c in self.columns) for row in self.rows]
    def column(self, name: str) -> List[Any]:
        return [row[name] for row in self.rows]
    def __len__(self):
        return len(self.rows)
def _context(plan: ProduceResults, tx, params: Mapping[str, Any], seed: int, sequence: int,
             memory: Optional[MemoryTracker]) -> ExecutionContext:
    evaluator = Evaluator(tx, params, query_rng(seed, sequence))
    return ExecutionContext(tx, evaluator, memory)
def execute(plan: ProduceResults, store: GraphStore, params: Optional[Mapping[str, Any]] = None,
            seed: int = 0, sequence: int = 0) -> Iterator[Row]:
    """Pull-based row stream; the read transaction closes when the stream is exhausted or closed"""
    tx = store.begin_read()
    try:
        ctx = _context(plan, tx, params or {}, seed, sequence, None)
        yield from plan.rows(ctx)
    finally:
        tx.close()
def profile(plan: ProduceResults, store: GraphStore, params: Optional[Mapping[str, Any]] = None,
            seed: int = 0, sequence: int = 0) -> Tuple[List[Row], ProfileTree]:
    """Runs the plan to completion; rows are identical to execute() under the same seed and sequence"""
    memory = MemoryTracker("operator-buffers")
    with store.begin_read() as tx:
        ctx = _context(plan, tx, params or {}, seed, sequence, memory)
        rows = list(plan.rows(ctx))
        tree = build_profile(plan, ctx.stats, tx.counters, memory.peak)
    return rows, tree
class QueryEngine:
    """Runs query text against one open store; safe to share between threads"""
    def __init__(self, store: GraphStore, seed: int = 0):
        self.store = store
        self.seed = int(seed)
        self.parser = get_parser()
        self._sequence = itertools.count()
        self._sequence_lock = threading.Lock()
    def next_sequence(self) -> int:
        with self._sequence_lock:
            return next(self._sequence)
    def prepare(self, text: str, params: Optional[Mapping[str, Any]] = None) -> Tuple[BoundQuery, ProduceResults]:
        bound = bind(self.parser.parse(text), params or {})
        return bound, plan_query(bound, self.store.stats())
    def explain(self, text: str, params: Optional[Mapping[str, Any]] = None) -> str:
        _, plan = self.prepare(text, params)
        return render_plan(plan)
    def stream(self, text: str, params: Optional[Mapping[str, Any]] = None,
               sequence: Optional[int] = None) -> Iterator[Row]:
        bound, plan = self.prepare(text, params)
        sequence = self.next_sequence() if sequence is None else sequence
        return execute(plan, self.store, bound.params, self.seed, sequence)
    def run(self, text: str, params: Optional[Mapping[str, Any]] = None, sequence: Optional[int] = None,
            profile_query: bool = False) -> QueryResult:
        bound, plan = self.prepare(text, params)
        sequence = self.next_sequence() if sequence is None else sequence
        if profile_query:
            rows, tree = profile(plan, self.store, bound.params, self.seed, sequence)
            logger.debug(f"Profiled query #{sequence}: {len(rows)} rows, {tree.total_db_hits} db hits")
            return QueryResult(plan.column_names, rows, tree, sequence)
        rows = list(execute(plan, self.store, bound.params, self.seed, sequence))
        return QueryResult(plan.column_names, rows, None, sequence)
    def profile(self, text: str, params: Optional[Mapping[str, Any]] = None,
                sequence: Optional[int] = None) -> QueryResult:
        return self.run(text, params, sequence, profile_query=True)
