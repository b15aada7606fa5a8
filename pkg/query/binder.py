# query/binder.py
"""
Parameter binding and scope checking.

Label and relationship-type parameters ($NODE_TYPE, $REL_TYPE) are schema
positions: they are substituted into the patterns here so the planner only
ever sees concrete names. Value parameters stay in the AST and are looked up
at execution time from BoundQuery.params.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Tuple
import numpy as np
from .errors import MissingParameter, TypeMismatch, UnboundVariable, UnsupportedConstruct
from .printer import column_name, format_expr
from .query_ast import (AGGREGATE_FUNCTIONS, FunctionCall, In, Match, NodePattern, Parameter, PathPattern,
                        QueryAst, RelPattern, Return, Unwind, Variable, Where, With, children,
                        contains_aggregate, free_variables, parameters)
logger = logging.getLogger(__name__)
@dataclass(frozen=True)
class BoundQuery:
    ast: QueryAst
    params: Dict[str, Any] = field(default_factory=dict)
    columns: Tuple[str, ...] = ()
def normalize_param(value: Any) -> Any:
    """Plain Python form of a parameter value (numpy arrays and scalars unwrapped)"""
    if isinstance(value, np.ndarray):
        if value.dtype.kind == 'f' and value.ndim == 1:
            return value.astype(np.float64)
        return [normalize_param(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [normalize_param(v) for v in value]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value
def _is_count(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value >= 0
class Binder:
    def __init__(self, ast: QueryAst, params: Mapping[str, Any]):
        self.ast = ast
        self.params = {str(k).lstrip('$'): normalize_param(v) for k, v in (params or {}).items()}
        self.used: set = set()
    # ---------------------------------------------------------------- parameters
    def _param(self, name: str) -> Any:
        if name not in self.params:
            raise MissingParameter(name)
        self.used.add(name)
        return self.params[name]
    def _schema_name(self, name, what: str):
        if not isinstance(name, Parameter):
            return name
        value = self._param(name.name)
        if not isinstance(value, str) or not value:
            raise TypeMismatch(f"${name.name} is a {what} and must be a non-empty string, got {value!r}")
        return value
    def _check_params(self, expr):
        for name in parameters(expr):
            self._param(name)
        self._check_param_types(expr)
    def _check_param_types(self, expr):
        if isinstance(expr, In) and isinstance(expr.container, Parameter):
            value = self.params[expr.container.name]
            if not isinstance(value, (list, np.ndarray)):
                raise TypeMismatch(f"${expr.container.name} must be a list, got {type(value).__name__}")
        for child in children(expr):
            self._check_param_types(child)
    def _check_limit(self, limit):
        if limit is None:
            return
        if free_variables(limit):
            raise UnsupportedConstruct("LIMIT must be a literal or a parameter")
        self._check_params(limit)
        value = self.params[limit.name] if isinstance(limit, Parameter) else getattr(limit, 'value', None)
        if not _is_count(value):
            name = f"${limit.name}" if isinstance(limit, Parameter) else format_expr(limit)
            raise TypeMismatch(f"LIMIT {name} must be a non-negative integer, got {value!r}")
    # ---------------------------------------------------------------- scope
    def _check_scope(self, expr, scope: FrozenSet[str], clause: str):
        for name in sorted(free_variables(expr)):
            if name not in scope:
                raise UnboundVariable(name, clause)
        self._check_aggregate_nesting(expr, top=True)
    def _check_aggregate_nesting(self, expr, top: bool):
        if isinstance(expr, FunctionCall) and expr.name in AGGREGATE_FUNCTIONS:
            if not top:
                raise UnsupportedConstruct(f"{expr.name}() must be a whole projection item")
            for arg in expr.args:
                if contains_aggregate(arg):
                    raise UnsupportedConstruct("nested aggregation")
            return
        for child in children(expr):
            self._check_aggregate_nesting(child, top=False)
    def _bind_pattern(self, pattern: PathPattern) -> PathPattern:
        nodes = tuple(NodePattern(n.variable, tuple(self._schema_name(l, 'label') for l in n.labels))
                      for n in pattern.nodes)
        rels = tuple(RelPattern(r.variable, self._schema_name(r.rel_type, 'relationship type'), r.direction)
                     for r in pattern.rels)
        return PathPattern(nodes, rels)
    def _bind_projection(self, clause, scope: FrozenSet[str], keyword: str) -> Tuple[Any, FrozenSet[str]]:
        names: List[str] = []
        aggregating = any(contains_aggregate(item.expr) for item in clause.items)
        for item in clause.items:
            self._check_params(item.expr)
            self._check_scope(item.expr, scope, keyword)
            if keyword == 'WITH' and item.alias is None and not isinstance(item.expr, Variable):
                raise UnsupportedConstruct(f"expression `{format_expr(item.expr)}` in WITH must be aliased")
            name = column_name(item) if keyword == 'RETURN' else (item.alias or item.expr.name)
            if name in names:
                raise UnsupportedConstruct(f"column `{name}` is projected twice")
            names.append(name)
        projected = frozenset(names)
        item_texts = {format_expr(item.expr) for item in clause.items}
        for sort in clause.order_by:
            self._check_params(sort.expr)
            if contains_aggregate(sort.expr):
                raise UnsupportedConstruct("aggregation in ORDER BY")
            if format_expr(sort.expr) in item_texts:
                continue
            visible = projected if (clause.distinct or aggregating) else projected | scope
            self._check_scope(sort.expr, visible, f"{keyword} ... ORDER BY")
        self._check_limit(clause.limit)
        return clause, projected
    # ---------------------------------------------------------------- clauses
    def bind(self) -> BoundQuery:
        clauses = list(self.ast.clauses)
        if not clauses or not isinstance(clauses[-1], Return):
            raise UnsupportedConstruct("a query must end with RETURN")
        scope: FrozenSet[str] = frozenset()
        bound = []
        previous = None
        columns: Tuple[str, ...] = ()
        for clause in clauses:
            if isinstance(clause, Match):
                pattern = self._bind_pattern(clause.pattern)
                for rel in pattern.rels:
                    if rel.variable is not None and rel.variable in scope:
                        raise UnsupportedConstruct(f"relationship variable `{rel.variable}` is already bound")
                new_scope = set(scope)
                new_scope.update(n.variable for n in pattern.nodes if n.variable)
                new_scope.update(r.variable for r in pattern.rels if r.variable)
                scope = frozenset(new_scope)
                bound.append(replace(clause, pattern=pattern))
            elif isinstance(clause, Where):
                if not isinstance(previous, (Match, With)):
                    raise UnsupportedConstruct("WHERE must follow MATCH, OPTIONAL MATCH or WITH")
                self._check_params(clause.expr)
                self._check_scope(clause.expr, scope, 'WHERE')
                if contains_aggregate(clause.expr):
                    raise UnsupportedConstruct("aggregation in WHERE")
                bound.append(clause)
            elif isinstance(clause, Unwind):
                self._check_params(clause.expr)
                self._check_scope(clause.expr, scope, 'UNWIND')
                if contains_aggregate(clause.expr):
                    raise UnsupportedConstruct("aggregation in UNWIND")
                scope = scope | {clause.alias}
                bound.append(clause)
            elif isinstance(clause, With):
                clause, scope = self._bind_projection(clause, scope, 'WITH')
                bound.append(clause)
            elif isinstance(clause, Return):
                if clause is not clauses[-1]:
                    raise UnsupportedConstruct("RETURN must be the final clause")
                clause, projected = self._bind_projection(clause, scope, 'RETURN')
                columns = tuple(column_name(item) for item in clause.items)
                bound.append(clause)
            previous = clause
        unused = sorted(set(self.params) - self.used)
        if unused:
            logger.debug(f"Unused query parameters: {', '.join(unused)}")
        return BoundQuery(QueryAst(tuple(bound)), dict(self.params), columns)
def bind(ast: QueryAst, params: Optional[Mapping[str, Any]] = None) -> BoundQuery:
    """Resolve parameters and check variable scope"""
    return Binder(ast, params or {}).bind()
