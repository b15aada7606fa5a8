# query/profiler.py
"""Plan and profile rendering (bottom-up tables, one row per operator)."""
from dataclasses import dataclass, field
from typing import Dict, List
from .operators import Operator, OperatorStats
@dataclass
class ProfileRow:
    id: int
    operator: str
    details: str
    estimated_rows: float
    rows: int = 0
    db_hits: int = 0
    page_cache_hits: int = 0
    page_cache_misses: int = 0
    time_ms: float = 0.0
@dataclass
class ProfileTree:
    operators: List[ProfileRow] = field(default_factory=list)
    total_db_hits: int = 0
    total_page_cache_hits: int = 0
    total_page_cache_misses: int = 0
    peak_allocated_bytes: int = 0
    def by_name(self, operator: str) -> List[ProfileRow]:
        return [row for row in self.operators if row.operator == operator]
    def row(self, op_id: int) -> ProfileRow:
        return next(row for row in self.operators if row.id == op_id)
    def bottom_up(self) -> List[ProfileRow]:
        return sorted(self.operators, key=lambda row: -row.id)
def build_profile(root: Operator, stats: Dict[int, OperatorStats], totals, peak_bytes: int) -> ProfileTree:
    tree = ProfileTree(total_db_hits=totals.db_hits, total_page_cache_hits=totals.page_cache_hits,
                       total_page_cache_misses=totals.page_cache_misses, peak_allocated_bytes=peak_bytes)
    for op in root.walk():
        op_stats = stats.get(op.id, OperatorStats())
        # operator time includes its children's; report the exclusive part
        children_ns = sum(stats[c.id].time_ns for c in op.children if c.id in stats)
        tree.operators.append(ProfileRow(
            id=op.id, operator=op.name, details=op.details, estimated_rows=op.estimated_rows,
            rows=op_stats.rows, db_hits=op_stats.counters.db_hits,
            page_cache_hits=op_stats.counters.page_cache_hits,
            page_cache_misses=op_stats.counters.page_cache_misses,
            time_ms=max(0, op_stats.time_ns - children_ns) / 1e6))
    return tree
def format_table(headers: List[str], body: List[List[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in body)) if body else len(h) for i, h in enumerate(headers)]
    rule = '+' + '+'.join('-' * (w + 2) for w in widths) + '+'
    def line(cells):
        return '|' + '|'.join(f" {c:<{w}} " for c, w in zip(cells, widths)) + '|'
    return '\n'.join([rule, line(headers), rule] + [line(r) for r in body] + [rule])
def _format_estimate(value: float) -> str:
    return str(int(round(value)))
def render_plan(root: Operator) -> str:
    """EXPLAIN output: operators bottom-up with details and estimates"""
    ops = sorted(root.walk(), key=lambda op: -op.id)
    body = [[op.name, str(op.id), op.details, _format_estimate(op.estimated_rows)] for op in ops]
    return format_table(['Operator', 'Id', 'Details', 'Estimated Rows'], body)
def render_profile(tree: ProfileTree) -> str:
    """PROFILE output followed by the totals line"""
    body = [[row.operator, str(row.id), row.details, _format_estimate(row.estimated_rows), str(row.rows),
             str(row.db_hits), str(row.page_cache_hits), str(row.page_cache_misses), f"{row.time_ms:.3f}"]
            for row in tree.bottom_up()]
    table = format_table(['Operator', 'Id', 'Details', 'Estimated Rows', 'Rows', 'DB Hits',
                    'Page Cache Hits', 'Page Cache Misses', 'Time (ms)'], body)
    return (f"{table}\nTotal database accesses: {tree.total_db_hits}, "
            f"allocated memory: {tree.peak_allocated_bytes} bytes")
