# query/operators.py
"""
Physical operators of the pull-based (Volcano) executor.

Operators are immutable plan nodes. `rows(ctx, argument)` starts a fresh
generator for one execution; all mutable state (counters, buffers, the
rand() generator) lives in the ExecutionContext, so one plan can run in
many threads at once.
"""
import heapq
import time
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple
from storage import AccessCounters, StorageError
from utils.memory_tracker import MemoryTracker
from .errors import ExecutionError, TypeMismatch
from .expressions import Evaluator
from .printer import format_expr
from .query_ast import FunctionCall
from .values import Descending, NodeRef, EdgeRef, hashable_key, is_list, sort_key, type_name
logger = logging.getLogger(__name__)
Row = Dict[str, Any]
@dataclass
class OperatorStats:
    rows: int = 0
    counters: AccessCounters = field(default_factory=AccessCounters)
    time_ns: int = 0
    @property
    def db_hits(self) -> int:
        return self.counters.db_hits
class ExecutionContext:
    """Per-execution state shared by every operator of one plan run"""
    def __init__(self, tx, evaluator: Evaluator, memory: Optional[MemoryTracker] = None):
        self.tx = tx
        self.evaluator = evaluator
        self.memory = memory or MemoryTracker("operator-buffers")
        self.stats: Dict[int, OperatorStats] = {}
    def stats_for(self, operator: "Operator") -> OperatorStats:
        stats = self.stats.get(operator.id)
        if stats is None:
            stats = self.stats[operator.id] = OperatorStats()
        return stats
class Operator:
    """Base plan node; subclasses implement `_rows`"""
    name = 'Operator'
    def __init__(self, children: Sequence["Operator"] = ()):
        self.children: Tuple["Operator", ...] = tuple(children)
        self.id: Optional[int] = None
        self.estimated_rows: float = 0.0
    @property
    def child(self) -> "Operator":
        return self.children[0]
    @property
    def details(self) -> str:
        return ''
    def rows(self, ctx: ExecutionContext, argument: Optional[Row] = None) -> Iterator[Row]:
        stats = ctx.stats_for(self)
        inner = self._rows(ctx, argument or {}, stats.counters)
        try:
            while True:
                started = time.perf_counter_ns()
                try:
                    row = next(inner)
                except StopIteration:
                    stats.time_ns += time.perf_counter_ns() - started
                    return
                except StorageError as e:
                    raise ExecutionError(self.id, self.name, e) from e
                stats.time_ns += time.perf_counter_ns() - started
                stats.rows += 1
                yield row
        finally:
            inner.close()
    def _rows(self, ctx: ExecutionContext, argument: Row, charge: AccessCounters) -> Iterator[Row]:
        raise NotImplementedError(f"{self.__class__.__name__} must implement _rows()")
    def walk(self) -> Iterator["Operator"]:
        """Pre-order traversal; the inner (right) branch of Apply comes before the outer one"""
        yield self
        for child in reversed(self.children):
            yield from child.walk()
    def __repr__(self):
        return f"{self.name}({self.details})"
# ------------------------------------------------------------------ leaves
class NodeIndexSeek(Operator):
    name = 'NodeIndexSeek'
    def __init__(self, variable: str, label: str, key: str, values, op: str = 'IN'):
        super().__init__()
        self.variable = variable
        self.label = label
        self.key = key
        self.values = values
        self.op = op
    @property
    def details(self) -> str:
        return (f"HASH INDEX {self.variable}:{self.label}({self.key}) "
                f"WHERE {self.key} {self.op} {format_expr(self.values)}")
    def _rows(self, ctx, argument, charge):
        values = ctx.evaluator.evaluate(self.values, argument, charge)
        if values is None:
            return
        if self.op == '=':
            values = [values]
        elif not is_list(values):
            raise TypeMismatch(f"IN expects a list, got {type_name(values)}")
        for node_id in ctx.tx.node_index_seek(self.label, self.key, list(values), charge):
            row = dict(argument)
            row[self.variable] = NodeRef(node_id)
            yield row
class NodeByLabelScan(Operator):
    name = 'NodeByLabelScan'
    def __init__(self, variable: str, label: str):
        super().__init__()
        self.variable = variable
        self.label = label
    @property
    def details(self) -> str:
        return f"{self.variable}:{self.label}"
    def _rows(self, ctx, argument, charge):
        for node_id in ctx.tx.nodes_by_label(self.label, charge):
            row = dict(argument)
            row[self.variable] = NodeRef(node_id)
            yield row
class AllNodesScan(Operator):
    name = 'AllNodesScan'
    def __init__(self, variable: str):
        super().__init__()
        self.variable = variable
    @property
    def details(self) -> str:
        return self.variable
    def _rows(self, ctx, argument, charge):
        for node_id in ctx.tx.all_nodes(charge):
            row = dict(argument)
            row[self.variable] = NodeRef(node_id)
            yield row
class Argument(Operator):
    """Leaf of an Apply inner branch: yields the current outer row once"""
    name = 'Argument'
    def __init__(self, variables: Sequence[str] = ()):
        super().__init__()
        self.variables = tuple(variables)
    @property
    def details(self) -> str:
        return ', '.join(self.variables)
    def _rows(self, ctx, argument, charge):
        yield dict(argument)
# ------------------------------------------------------------------ pattern operators
class Expand(Operator):
    def __init__(self, child: Operator, from_var: str, rel_var: str, to_var: str, direction: str,
                 rel_type: Optional[str], into: bool = False):
        super().__init__((child,))
        self.from_var = from_var
        self.rel_var = rel_var
        self.to_var = to_var
        self.direction = direction
        self.rel_type = rel_type
        self.into = into
    @property
    def name(self) -> str:
        return 'Expand(Into)' if self.into else 'Expand(All)'
    @property
    def details(self) -> str:
        rel = f"[{self.rel_var}{':' + self.rel_type if self.rel_type else ''}]"
        left = '<-' if self.direction == 'in' else '-'
        right = '->' if self.direction == 'out' else '-'
        return f"({self.from_var}){left}{rel}{right}({self.to_var})"
    def _rows(self, ctx, argument, charge):
        for row in self.child.rows(ctx, argument):
            source = row.get(self.from_var)
            if source is None:
                continue
            target = row.get(self.to_var) if self.into else None
            for edge_id, neighbour in ctx.tx.expand(source.node_id, self.direction, self.rel_type, charge):
                if self.into and (target is None or target.node_id != neighbour):
                    continue
                out = dict(row)
                out[self.rel_var] = EdgeRef(edge_id)
                out[self.to_var] = NodeRef(neighbour)
                yield out
class Filter(Operator):
    name = 'Filter'
    def __init__(self, child: Operator, predicate):
        super().__init__((child,))
        self.predicate = predicate
    @property
    def details(self) -> str:
        return format_expr(self.predicate)
    def _rows(self, ctx, argument, charge):
        for row in self.child.rows(ctx, argument):
            if ctx.evaluator.predicate(self.predicate, row, charge):
                yield row
class OptionalOperator(Operator):
    """Emits one null-extended row when the inner branch produces nothing"""
    name = 'Optional'
    def __init__(self, child: Operator, nullable: Sequence[str]):
        super().__init__((child,))
        self.nullable = tuple(nullable)
    @property
    def details(self) -> str:
        return ', '.join(self.nullable)
    def _rows(self, ctx, argument, charge):
        matched = False
        for row in self.child.rows(ctx, argument):
            matched = True
            yield row
        if not matched:
            row = dict(argument)
            for name in self.nullable:
                row.setdefault(name, None)
            yield row
class Apply(Operator):
    """Runs the inner branch once per outer row, with that row as its Argument"""
    name = 'Apply'
    def __init__(self, outer: Operator, inner: Operator):
        super().__init__((outer, inner))
    def _rows(self, ctx, argument, charge):
        outer, inner = self.children
        for row in outer.rows(ctx, argument):
            yield from inner.rows(ctx, row)
# ------------------------------------------------------------------ projections
class Projection(Operator):
    name = 'Projection'
    def __init__(self, child: Operator, items: Sequence[Tuple[str, Any]]):
        super().__init__((child,))
        self.items = tuple(items)
    @property
    def details(self) -> str:
        return ', '.join(f"{format_expr(expr)} AS `{name}`" for name, expr in self.items)
    def _rows(self, ctx, argument, charge):
        evaluate = ctx.evaluator.evaluate
        for row in self.child.rows(ctx, argument):
            out = dict(row)
            for name, expr in self.items:
                out[name] = evaluate(expr, row, charge)
            yield out
class Unwind(Operator):
    name = 'Unwind'
    def __init__(self, child: Operator, expr, alias: str):
        super().__init__((child,))
        self.expr = expr
        self.alias = alias
    @property
    def details(self) -> str:
        return f"{format_expr(self.expr)} AS {self.alias}"
    def _rows(self, ctx, argument, charge):
        for row in self.child.rows(ctx, argument):
            value = ctx.evaluator.evaluate(self.expr, row, charge)
            if value is None:
                continue
            for item in (value if is_list(value) else [value]):
                out = dict(row)
                out[self.alias] = item
                yield out
class Distinct(Operator):
    """Evaluates the projection and drops repeated rows; output holds only the projected columns"""
    name = 'Distinct'
    def __init__(self, child: Operator, items: Sequence[Tuple[str, Any]]):
        super().__init__((child,))
        self.items = tuple(items)
    @property
    def details(self) -> str:
        return ', '.join(f"{format_expr(expr)} AS `{name}`" for name, expr in self.items)
    def _rows(self, ctx, argument, charge):
        seen = set()
        held = 0
        try:
            for row in self.child.rows(ctx, argument):
                out = {name: ctx.evaluator.evaluate(expr, row, charge) for name, expr in self.items}
                key = tuple(hashable_key(out[name]) for name, _ in self.items)
                if key in seen:
                    continue
                seen.add(key)
                held += ctx.memory.track(key)
                yield out
        finally:
            ctx.memory.release(held)
class _Group:
    __slots__ = ('row', 'states', 'seen', 'nbytes')
    def __init__(self, row):
        self.row = row
        self.states: List[Any] = []
        self.seen: List[set] = []
        self.nbytes = 0
class Aggregate(Operator):
    """Grouping aggregation over count() / collect() / collect(DISTINCT ...)"""
    name = 'Aggregate'
    def __init__(self, child: Operator, grouping: Sequence[Tuple[str, Any]],
                 aggregates: Sequence[Tuple[str, FunctionCall]], order: Sequence[str]):
        super().__init__((child,))
        self.grouping = tuple(grouping)
        self.aggregates = tuple(aggregates)
        self.order = tuple(order)
    @property
    def details(self) -> str:
        parts = [f"{format_expr(expr)} AS `{name}`" for name, expr in self.grouping]
        parts += [f"{format_expr(call)} AS `{name}`" for name, call in self.aggregates]
        return ', '.join(parts)
    def _new_group(self, row) -> _Group:
        group = _Group(row)
        for _, call in self.aggregates:
            group.states.append(0 if call.name == 'count' else [])
            group.seen.append(set())
        return group
    def _rows(self, ctx, argument, charge):
        evaluate = ctx.evaluator.evaluate
        groups: Dict[tuple, _Group] = {}
        try:
            for row in self.child.rows(ctx, argument):
                keys = {name: evaluate(expr, row, charge) for name, expr in self.grouping}
                group_key = tuple(hashable_key(keys[name]) for name, _ in self.grouping)
                group = groups.get(group_key)
                if group is None:
                    group = groups[group_key] = self._new_group(keys)
                    group.nbytes += ctx.memory.track(group_key)
                for i, (_, call) in enumerate(self.aggregates):
                    value = evaluate(call.args[0], row, charge)
                    if value is None:
                        continue
                    if call.distinct:
                        value_key = hashable_key(value)
                        if value_key in group.seen[i]:
                            continue
                        group.seen[i].add(value_key)
                    if call.name == 'count':
                        group.states[i] += 1
                    else:
                        group.states[i].append(value)
                        group.nbytes += ctx.memory.track(value)
            if not groups and not self.grouping:
                groups[()] = self._new_group({})
            for group in groups.values():
                out = dict(group.row)
                for i, (name, _) in enumerate(self.aggregates):
                    out[name] = group.states[i]
                yield {name: out[name] for name in self.order}
        finally:
            ctx.memory.release(sum(g.nbytes for g in groups.values()))
# ------------------------------------------------------------------ ordering
def _sort_tuple(values: Sequence[Any], descending: Sequence[bool]) -> tuple:
    return tuple(Descending(sort_key(v)) if desc else sort_key(v) for v, desc in zip(values, descending))
def _format_keys(keys) -> str:
    return ', '.join(format_expr(expr) + (' DESC' if desc else ' ASC') for expr, desc in keys)
def _limit_value(ctx, expr, argument, charge) -> int:
    value = ctx.evaluator.evaluate(expr, argument, charge)
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise TypeMismatch(f"LIMIT must be a non-negative integer, got {value!r}")
    return value
class Sort(Operator):
    name = 'Sort'
    def __init__(self, child: Operator, keys: Sequence[Tuple[Any, bool]]):
        super().__init__((child,))
        self.keys = tuple(keys)
    @property
    def details(self) -> str:
        return _format_keys(self.keys)
    def _rows(self, ctx, argument, charge):
        descending = [d for _, d in self.keys]
        buffered = []
        held = 0
        try:
            for seq, row in enumerate(self.child.rows(ctx, argument)):
                values = [ctx.evaluator.evaluate(expr, row, charge) for expr, _ in self.keys]
                buffered.append((_sort_tuple(values, descending), seq, row))
                held += ctx.memory.track(row)
            buffered.sort(key=lambda entry: (entry[0], entry[1]))
            for _, _, row in buffered:
                yield row
        finally:
            ctx.memory.release(held)
class _HeapEntry:
    """Inverted ordering so heapq's min-heap keeps the largest (key, seq) on top"""
    __slots__ = ('key', 'seq', 'row', 'nbytes')
    def __init__(self, key, seq, row, nbytes):
        self.key = key
        self.seq = seq
        self.row = row
        self.nbytes = nbytes
    def __lt__(self, other: "_HeapEntry") -> bool:
        return (other.key, other.seq) < (self.key, self.seq)
class Top(Operator):
    """ORDER BY + LIMIT as a bounded max-heap; keeps the `limit` smallest rows, ties by arrival"""
    name = 'Top'
    def __init__(self, child: Operator, keys: Sequence[Tuple[Any, bool]], limit):
        super().__init__((child,))
        self.keys = tuple(keys)
        self.limit = limit
    @property
    def details(self) -> str:
        return f"{_format_keys(self.keys)} LIMIT {format_expr(self.limit)}"
    def _rows(self, ctx, argument, charge):
        limit = _limit_value(ctx, self.limit, argument, charge)
        descending = [d for _, d in self.keys]
        heap: List[_HeapEntry] = []
        try:
            # drains the input even for LIMIT 0
            for seq, row in enumerate(self.child.rows(ctx, argument)):
                if limit == 0:
                    continue
                values = [ctx.evaluator.evaluate(expr, row, charge) for expr, _ in self.keys]
                key = _sort_tuple(values, descending)
                if len(heap) < limit:
                    heapq.heappush(heap, _HeapEntry(key, seq, row, ctx.memory.track(row)))
                elif (key, seq) < (heap[0].key, heap[0].seq):
                    evicted = heapq.heapreplace(heap, _HeapEntry(key, seq, row, ctx.memory.track(row)))
                    ctx.memory.release(evicted.nbytes)
            ordered = sorted(heap, key=lambda entry: (entry.key, entry.seq))
            for entry in ordered:
                yield entry.row
        finally:
            ctx.memory.release(sum(entry.nbytes for entry in heap))
class Limit(Operator):
    name = 'Limit'
    def __init__(self, child: Operator, limit):
        super().__init__((child,))
        self.limit = limit
    @property
    def details(self) -> str:
        return format_expr(self.limit)
    def _rows(self, ctx, argument, charge):
        limit = _limit_value(ctx, self.limit, argument, charge)
        if limit == 0:
            return
        produced = 0
        for row in self.child.rows(ctx, argument):
            yield row
            produced += 1
            if produced >= limit:
                return
class ProduceResults(Operator):
    """Root: shapes each row into the result columns"""
    name = 'ProduceResults'
    def __init__(self, child: Operator, columns: Sequence[Tuple[str, Any]]):
        super().__init__((child,))
        self.columns = tuple(columns)
    @property
    def column_names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.columns)
    @property
    def details(self) -> str:
        return ', '.join(f"`{name}`" for name, _ in self.columns)
    def _rows(self, ctx, argument, charge):
        evaluate = ctx.evaluator.evaluate
        for row in self.child.rows(ctx, argument):
            yield {name: (row.get(name) if expr is None else evaluate(expr, row, charge))
                   for name, expr in self.columns}
