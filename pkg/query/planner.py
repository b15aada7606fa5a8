# query/planner.py
"""
Rule-based planner: BoundQuery -> physical operator tree.

Patterns are planned from one anchor node outwards, one Expand(All) per hop,
so a multi-hop pattern never becomes a cross product. The anchor is an index
seek when WHERE restricts an indexed `id`, else a label scan, else a full
scan. OPTIONAL MATCH becomes Apply(outer, Optional(... Argument)).

Cardinality estimates (deterministic, not meant to be accurate):
    seek            number of looked-up values
    label scan      label count; all-nodes scan: node count
    Expand          input x average degree for (source label, rel type)
    label Filter    input x label selectivity (other predicates keep the estimate)
    Optional        max(inner, input); Apply: Optional's estimate
    Top / Limit     min(input, limit); Aggregate without grouping keys: 1
"""
import itertools
import logging
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple
from storage import StoreStats
from .binder import BoundQuery
from .errors import UnsupportedConstruct
from .operators import (AllNodesScan, Aggregate, Apply, Argument, Distinct, Expand, Filter, Limit, NodeByLabelScan,
                        NodeIndexSeek, Operator, OptionalOperator, ProduceResults, Projection, Sort, Top, Unwind)
from .printer import column_name, format_expr
from .query_ast import (AGGREGATE_FUNCTIONS, And, Comparison, FunctionCall, HasLabel, In, Literal, Match, Not,
                        Parameter, PathPattern, Property, Return, Unwind as UnwindClause, Variable, Where, With,
                        contains_aggregate, free_variables)
logger = logging.getLogger(__name__)
ID_KEY = 'id'
_REVERSED = {'out': 'in', 'in': 'out', 'both': 'both'}
def split_conjuncts(expr) -> List[Any]:
    if isinstance(expr, And):
        return split_conjuncts(expr.left) + split_conjuncts(expr.right)
    return [expr]
def join_conjuncts(conjuncts: Sequence[Any]):
    result = None
    for conjunct in conjuncts:
        result = conjunct if result is None else And(result, conjunct)
    return result
def _id_subject(expr) -> Optional[str]:
    """Variable name if expr is `v.id` or `id(v)`"""
    if isinstance(expr, Property) and expr.key == ID_KEY and isinstance(expr.subject, Variable):
        return expr.subject.name
    if (isinstance(expr, FunctionCall) and expr.name == 'id' and len(expr.args) == 1
            and isinstance(expr.args[0], Variable)):
        return expr.args[0].name
    return None
def seekable(conjunct) -> Optional[Tuple[str, str, Any]]:
    """(variable, op, values expr) for `v.id IN list`, `id(v) IN list` or `v.id = value`"""
    if isinstance(conjunct, In):
        variable = _id_subject(conjunct.item)
        if variable is not None and not free_variables(conjunct.container):
            return variable, 'IN', conjunct.container
    if isinstance(conjunct, Comparison) and conjunct.op == '=':
        for side, other in ((conjunct.left, conjunct.right), (conjunct.right, conjunct.left)):
            variable = _id_subject(side)
            if variable is not None and not free_variables(other):
                return variable, '=', other
    return None
class Planner:
    def __init__(self, bound: BoundQuery, stats: StoreStats):
        self.bound = bound
        self.params = bound.params
        self.stats = stats
        self.indexes = set(map(tuple, stats.indexes))
        self._anon = itertools.count()
        self.current: Optional[Operator] = None
        self.scope: Set[str] = set()
        # best known label of each node variable, for degree estimates
        self.labels: Dict[str, Optional[str]] = {}
    # ---------------------------------------------------------------- helpers
    def _anon_name(self) -> str:
        return f"anon_{next(self._anon)}"
    def _estimate(self, op: Operator, rows: float) -> Operator:
        op.estimated_rows = max(0.0, float(rows))
        return op
    def _est(self, op: Optional[Operator]) -> float:
        return op.estimated_rows if op is not None else 1.0
    def _limit_value(self, expr) -> Optional[int]:
        if isinstance(expr, Parameter):
            return self.params.get(expr.name)
        if isinstance(expr, Literal):
            return expr.value
        return None
    def _seek_size(self, op: str, values) -> float:
        if op == '=':
            return 1.0
        if isinstance(values, Parameter):
            value = self.params.get(values.name)
            return float(len(value)) if value is not None else 1.0
        return float(len(getattr(values, 'items', ()) or ()))
    def _filter(self, child: Operator, conjuncts: Sequence[Any]) -> Operator:
        if not conjuncts:
            return child
        estimate = self._est(child)
        for conjunct in conjuncts:
            if isinstance(conjunct, HasLabel):
                estimate *= self.stats.label_selectivity(conjunct.label)
        return self._estimate(Filter(child, join_conjuncts(conjuncts)), estimate)
    @staticmethod
    def _take_ready(pending: List[Any], bound: Set[str]) -> List[Any]:
        ready = [c for c in pending if free_variables(c) <= bound]
        for conjunct in ready:
            pending.remove(conjunct)
        return ready
    # ---------------------------------------------------------------- patterns
    def _name_pattern(self, pattern: PathPattern):
        nodes = [n.variable or self._anon_name() for n in pattern.nodes]
        rels = [r.variable or self._anon_name() for r in pattern.rels]
        if len(set(nodes)) != len(nodes):
            raise UnsupportedConstruct("a node variable may appear only once per pattern")
        if len(set(rels)) != len(rels) or set(rels) & set(nodes):
            raise UnsupportedConstruct("relationship variables must be distinct within a pattern")
        for name in rels:
            if name in self.scope:
                raise UnsupportedConstruct(f"relationship variable `{name}` is already bound")
        return nodes, rels
    def _anchor(self, pattern: PathPattern, nodes: List[str], pending: List[Any]):
        """Leaf operator for an unbound pattern; returns (operator, position)"""
        for conjunct in list(pending):
            seek = seekable(conjunct)
            if seek is None:
                continue
            variable, op, values = seek
            if variable not in nodes:
                continue
            position = nodes.index(variable)
            for label in pattern.nodes[position].labels:
                if (label, ID_KEY) in self.indexes:
                    pending.remove(conjunct)
                    leaf = NodeIndexSeek(variable, label, ID_KEY, values, op)
                    return self._estimate(leaf, self._seek_size(op, values)), position, label
        labelled = [(self.stats.label_counts.get(label, 0), position, label)
                    for position, node in enumerate(pattern.nodes) for label in node.labels]
        if labelled:
            count, position, label = min(labelled)
            return self._estimate(NodeByLabelScan(nodes[position], label), count), position, label
        return self._estimate(AllNodesScan(nodes[0]), self.stats.node_count), 0, None
    def _plan_pattern(self, pattern: PathPattern, start: Optional[Operator], pending: List[Any]) -> Operator:
        nodes, rels = self._name_pattern(pattern)
        bound = set(self.scope)
        positions = [i for i, name in enumerate(nodes) if name in bound]
        if positions:
            position = positions[0]
            current = start
            used_label = None
        elif start is None:
            current, position, used_label = self._anchor(pattern, nodes, pending)
            bound.add(nodes[position])
        else:
            raise UnsupportedConstruct("disconnected patterns (cross products) are not supported")
        first = nodes[position]
        if first not in self.labels or self.labels[first] is None:
            self.labels[first] = used_label or next(iter(pattern.nodes[position].labels), None)
        checks = [HasLabel(Variable(first), l) for l in pattern.nodes[position].labels if l != used_label]
        current = self._filter(current, checks + self._take_ready(pending, bound))
        expanded: List[str] = []
        hops = [(j, j + 1, False) for j in range(position, len(rels))]
        hops += [(j + 1, j, True) for j in reversed(range(position))]
        for source, target, leftward in hops:
            rel_index = min(source, target)
            rel = pattern.rels[rel_index]
            direction = _REVERSED[rel.direction] if leftward else rel.direction
            into = nodes[target] in bound
            expand = Expand(current, nodes[source], rels[rel_index], nodes[target], direction, rel.rel_type, into)
            self._estimate(expand, self._est(current) * self._degree(nodes[source], direction, rel.rel_type))
            bound.update((nodes[target], rels[rel_index]))
            target_labels = pattern.nodes[target].labels
            if nodes[target] not in self.labels or self.labels[nodes[target]] is None:
                self.labels[nodes[target]] = next(iter(target_labels), None)
            checks = [HasLabel(Variable(nodes[target]), l) for l in target_labels]
            checks += [Not(Comparison('=', Variable(rels[rel_index]), Variable(previous)))
                       for previous in reversed(expanded)]
            expanded.append(rels[rel_index])
            current = self._filter(expand, checks + self._take_ready(pending, bound))
        self.scope.update(nodes)
        self.scope.update(rels)
        return current
    def _degree(self, variable: str, direction: str, rel_type: Optional[str]) -> float:
        label = self.labels.get(variable)
        if direction == 'out':
            return self.stats.out_degree(label, rel_type)
        if direction == 'in':
            return self.stats.in_degree(label, rel_type)
        return self.stats.out_degree(label, rel_type) + self.stats.in_degree(label, rel_type)
    def _plan_match(self, clause: Match, where):
        pending = split_conjuncts(where) if where is not None else []
        if not clause.optional:
            self.current = self._plan_pattern(clause.pattern, self.current, pending)
            self.current = self._filter(self.current, pending)
            return
        outer = self.current
        outer_scope = set(self.scope)
        if outer is None or not any(n.variable in outer_scope for n in clause.pattern.nodes if n.variable):
            raise UnsupportedConstruct("OPTIONAL MATCH must share a variable with the preceding clauses")
        argument = self._estimate(Argument(sorted(outer_scope)), self._est(outer))
        inner = self._plan_pattern(clause.pattern, argument, pending)
        inner = self._filter(inner, pending)
        nullable = sorted(self.scope - outer_scope)
        optional = self._estimate(OptionalOperator(inner, nullable), max(self._est(inner), self._est(outer)))
        self.current = self._estimate(Apply(outer, optional), optional.estimated_rows)
    # ---------------------------------------------------------------- projections
    def _plan_projection(self, clause, is_return: bool) -> List[Tuple[str, Any]]:
        """Plans WITH / RETURN; returns the ProduceResults columns for RETURN"""
        if self.current is None:
            raise UnsupportedConstruct("a query must start with MATCH")
        items = [((column_name(item) if is_return else (item.alias or item.expr.name)), item.expr)
                 for item in clause.items]
        names = [name for name, _ in items]
        item_columns = {format_expr(expr): name for name, expr in items}
        aggregating = any(contains_aggregate(expr) for _, expr in items)
        narrowed = aggregating or clause.distinct
        estimate = self._est(self.current)
        if aggregating:
            grouping = [(n, e) for n, e in items if not contains_aggregate(e)]
            aggregates = [(n, e) for n, e in items if contains_aggregate(e)]
            for _, call in aggregates:
                if not (isinstance(call, FunctionCall) and call.name in AGGREGATE_FUNCTIONS):
                    raise UnsupportedConstruct(f"aggregate inside an expression: {format_expr(call)}")
            self.current = self._estimate(Aggregate(self.current, grouping, aggregates, names),
                                          estimate if grouping else 1)
        elif clause.distinct:
            self.current = self._estimate(Distinct(self.current, items), estimate)
        # sort keys become columns
        keys = []
        extra: List[Tuple[str, Any]] = []
        for sort in clause.order_by:
            text = format_expr(sort.expr)
            if text in item_columns:
                keys.append((Variable(item_columns[text]), sort.descending))
            elif isinstance(sort.expr, Variable):
                keys.append((sort.expr, sort.descending))
            else:
                if all(name != text for name, _ in extra):
                    extra.append((text, sort.expr))
                keys.append((Variable(text), sort.descending))
        computed = [] if narrowed else [(n, e) for n, e in items
                                         if not (isinstance(e, Variable) and e.name == n)]
        materialize = narrowed or bool(clause.order_by) or not is_return
        projection = (computed if materialize else []) + extra
        if projection:
            self.current = self._estimate(Projection(self.current, projection), self._est(self.current))
        limit_value = self._limit_value(clause.limit) if clause.limit is not None else None
        if keys and clause.limit is not None:
            self.current = self._estimate(Top(self.current, keys, clause.limit),
                                          min(self._est(self.current), limit_value))
        elif keys:
            self.current = self._estimate(Sort(self.current, keys), self._est(self.current))
        elif clause.limit is not None:
            self.current = self._estimate(Limit(self.current, clause.limit),
                                          min(self._est(self.current), limit_value))
        self.scope = set(names)
        if is_return:
            return [(name, None if materialize else expr) for name, expr in items]
        return []
    # ---------------------------------------------------------------- entry
    def plan(self) -> ProduceResults:
        clauses = list(self.bound.ast.clauses)
        columns: List[Tuple[str, Any]] = []
        i = 0
        while i < len(clauses):
            clause = clauses[i]
            following = clauses[i + 1] if i + 1 < len(clauses) else None
            where = following.expr if isinstance(following, Where) else None
            if isinstance(clause, Match):
                self._plan_match(clause, where)
                i += 2 if where is not None else 1
                continue
            if isinstance(clause, With):
                self._plan_projection(clause, is_return=False)
                if where is not None:
                    pending = split_conjuncts(where)
                    self.current = self._filter(self.current, pending)
                    i += 1
            elif isinstance(clause, UnwindClause):
                if self.current is None:
                    self.current = self._estimate(Argument(), 1)
                self.current = self._estimate(Unwind(self.current, clause.expr, clause.alias),
                                              self._est(self.current))
                self.scope.add(clause.alias)
            elif isinstance(clause, Return):
                columns = self._plan_projection(clause, is_return=True)
            elif isinstance(clause, Where):
                raise UnsupportedConstruct("WHERE must follow MATCH, OPTIONAL MATCH or WITH")
            i += 1
        root = self._estimate(ProduceResults(self.current, columns), self._est(self.current))
        for op_id, op in enumerate(root.walk()):
            op.id = op_id
        logger.debug(f"Planned {len(list(root.walk()))} operators")
        return root
def plan(bound: BoundQuery, stats: StoreStats) -> ProduceResults:
    """Physical plan for a bound query; ids are assigned top-down"""
    return Planner(bound, stats).plan()
