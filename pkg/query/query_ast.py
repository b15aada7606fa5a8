# query/query_ast.py
"""
Immutable AST for the supported Cypher subset.
Frozen dataclasses compare structurally, which the parse/print round trip relies on.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Any, Optional, Tuple, Union
# ---------------------------------------------------------------- expressions
@dataclass(frozen=True)
class Variable:
    name: str
@dataclass(frozen=True)
class Parameter:
    name: str
@dataclass(frozen=True)
class Literal:
    value: Any
@dataclass(frozen=True)
class ListLiteral:
    items: Tuple["Expr", ...] = ()
@dataclass(frozen=True)
class Property:
    subject: "Expr"
    key: str
@dataclass(frozen=True)
class Index:
    subject: "Expr"
    index: "Expr"
@dataclass(frozen=True)
class FunctionCall:
    name: str
    args: Tuple["Expr", ...] = ()
    distinct: bool = False
@dataclass(frozen=True)
class Reduce:
    accumulator: str
    init: "Expr"
    variable: str
    source: "Expr"
    body: "Expr"
@dataclass(frozen=True)
class In:
    item: "Expr"
    container: "Expr"
@dataclass(frozen=True)
class Comparison:
    op: str
    left: "Expr"
    right: "Expr"
@dataclass(frozen=True)
class Not:
    operand: "Expr"
@dataclass(frozen=True)
class And:
    left: "Expr"
    right: "Expr"
@dataclass(frozen=True)
class Or:
    left: "Expr"
    right: "Expr"
@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"
@dataclass(frozen=True)
class HasLabel:
    """Planner-generated label predicate (`n:PAPER`); never produced by the parser"""
    subject: "Expr"
    label: str
Expr = Union[Variable, Parameter, Literal, ListLiteral, Property, Index, FunctionCall, Reduce,
             In, Comparison, Not, And, Or, Add, HasLabel]
AGGREGATE_FUNCTIONS = frozenset({'count', 'collect'})
FUNCTION_ARITY = {
    'rand': 0, 'labels': 1, 'keys': 1, 'type': 1, 'count': 1, 'collect': 1, 'id': 1,
}
# ---------------------------------------------------------------- patterns
@dataclass(frozen=True)
class NodePattern:
    variable: Optional[str] = None
    labels: Tuple[Union[str, Parameter], ...] = ()
@dataclass(frozen=True)
class RelPattern:
    variable: Optional[str] = None
    rel_type: Optional[Union[str, Parameter]] = None
    direction: str = 'out'
@dataclass(frozen=True)
class PathPattern:
    nodes: Tuple[NodePattern, ...]
    rels: Tuple[RelPattern, ...] = ()
# ---------------------------------------------------------------- clauses
@dataclass(frozen=True)
class ProjectionItem:
    expr: Expr
    alias: Optional[str] = None
@dataclass(frozen=True)
class SortItem:
    expr: Expr
    descending: bool = False
@dataclass(frozen=True)
class Match:
    pattern: PathPattern
    optional: bool = False
@dataclass(frozen=True)
class Where:
    expr: Expr
@dataclass(frozen=True)
class With:
    items: Tuple[ProjectionItem, ...]
    distinct: bool = False
    order_by: Tuple[SortItem, ...] = ()
    limit: Optional[Expr] = None
@dataclass(frozen=True)
class Unwind:
    expr: Expr
    alias: str
@dataclass(frozen=True)
class Return:
    items: Tuple[ProjectionItem, ...]
    distinct: bool = False
    order_by: Tuple[SortItem, ...] = ()
    limit: Optional[Expr] = None
Clause = Union[Match, Where, With, Unwind, Return]
@dataclass(frozen=True)
class QueryAst:
    clauses: Tuple[Clause, ...] = field(default_factory=tuple)
def contains_aggregate(expr: Expr) -> bool:
    if isinstance(expr, FunctionCall) and expr.name in AGGREGATE_FUNCTIONS:
        return True
    return any(contains_aggregate(child) for child in children(expr))
def children(expr: Expr) -> Tuple[Expr, ...]:
    """Direct sub-expressions, in evaluation order"""
    if isinstance(expr, (Property, HasLabel)):
        return (expr.subject,)
    if isinstance(expr, Index):
        return (expr.subject, expr.index)
    if isinstance(expr, ListLiteral):
        return expr.items
    if isinstance(expr, FunctionCall):
        return expr.args
    if isinstance(expr, Reduce):
        return (expr.init, expr.source, expr.body)
    if isinstance(expr, In):
        return (expr.item, expr.container)
    if isinstance(expr, (Comparison, And, Or, Add)):
        return (expr.left, expr.right)
    if isinstance(expr, Not):
        return (expr.operand,)
    return ()
def free_variables(expr: Expr) -> frozenset:
    """Variables an expression reads (reduce-local names excluded)"""
    if isinstance(expr, Variable):
        return frozenset({expr.name})
    if isinstance(expr, Reduce):
        inner = free_variables(expr.body) - {expr.accumulator, expr.variable}
        return free_variables(expr.init) | free_variables(expr.source) | inner
    result = frozenset()
    for child in children(expr):
        result |= free_variables(child)
    return result
def parameters(expr: Expr) -> frozenset:
    if isinstance(expr, Parameter):
        return frozenset({expr.name})
    result = frozenset()
    for child in children(expr):
        result |= parameters(child)
    return result
