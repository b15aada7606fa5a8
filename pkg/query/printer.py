# query/printer.py
"""Pretty-printer producing query text that parses back to an equal AST."""
from typing import Union
import numpy as np
from .query_ast import (Add, And, Comparison, FunctionCall, HasLabel, In, Index, ListLiteral, Literal, Match,
                        NodePattern, Not, Or, Parameter, PathPattern, ProjectionItem, Property, QueryAst,
                        Reduce, RelPattern, Return, SortItem, Unwind, Variable, Where, With)
# binding strength of each expression form; higher binds tighter
_OR, _AND, _NOT, _CMP, _ADD, _POSTFIX, _ATOM = range(1, 8)
def _precedence(expr) -> int:
    if isinstance(expr, Or):
        return _OR
    if isinstance(expr, And):
        return _AND
    if isinstance(expr, Not):
        return _NOT
    if isinstance(expr, (Comparison, In, HasLabel)):
        return _CMP
    if isinstance(expr, Add):
        return _ADD
    if isinstance(expr, (Property, Index)):
        return _POSTFIX
    return _ATOM
def _wrap(expr, minimum: int) -> str:
    text = format_expr(expr)
    return f"({text})" if _precedence(expr) < minimum else text
def _format_literal(value) -> str:
    if value is None:
        return 'null'
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, str):
        escaped = value.replace('\\', '\\\\').replace("'", "\\'").replace('\n', '\\n').replace('\t', '\\t')
        return f"'{escaped}'"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)
def format_expr(expr) -> str:
    if isinstance(expr, Variable):
        return expr.name
    if isinstance(expr, Parameter):
        return f"${expr.name}"
    if isinstance(expr, Literal):
        return _format_literal(expr.value)
    if isinstance(expr, ListLiteral):
        return '[' + ', '.join(format_expr(item) for item in expr.items) + ']'
    if isinstance(expr, Property):
        return f"{_wrap(expr.subject, _POSTFIX)}.{expr.key}"
    if isinstance(expr, Index):
        return f"{_wrap(expr.subject, _POSTFIX)}[{format_expr(expr.index)}]"
    if isinstance(expr, FunctionCall):
        prefix = 'DISTINCT ' if expr.distinct else ''
        return f"{expr.name}({prefix}{', '.join(format_expr(a) for a in expr.args)})"
    if isinstance(expr, Reduce):
        return (f"reduce({expr.accumulator} = {format_expr(expr.init)}, {expr.variable} IN "
                f"{format_expr(expr.source)} | {format_expr(expr.body)})")
    if isinstance(expr, In):
        return f"{_wrap(expr.item, _ADD)} IN {_wrap(expr.container, _ADD)}"
    if isinstance(expr, Comparison):
        return f"{_wrap(expr.left, _ADD)} {expr.op} {_wrap(expr.right, _ADD)}"
    if isinstance(expr, HasLabel):
        return f"{_wrap(expr.subject, _POSTFIX)}:{expr.label}"
    if isinstance(expr, Not):
        return f"NOT {_wrap(expr.operand, _NOT)}"
    if isinstance(expr, And):
        return f"{_wrap(expr.left, _AND)} AND {_wrap(expr.right, _NOT)}"
    if isinstance(expr, Or):
        return f"{_wrap(expr.left, _OR)} OR {_wrap(expr.right, _AND)}"
    if isinstance(expr, Add):
        return f"{_wrap(expr.left, _ADD)} + {_wrap(expr.right, _POSTFIX)}"
    raise TypeError(f"not an expression: {expr!r}")
def _format_name(name: Union[str, Parameter]) -> str:
    return f"${name.name}" if isinstance(name, Parameter) else name
def format_node(node: NodePattern) -> str:
    labels = ''.join(f":{_format_name(l)}" for l in node.labels)
    return f"({node.variable or ''}{labels})"
def format_rel(rel: RelPattern) -> str:
    inner = rel.variable or ''
    if rel.rel_type is not None:
        inner += f":{_format_name(rel.rel_type)}"
    detail = f"[{inner}]" if inner else ''
    if rel.direction == 'out':
        return f"-{detail}->"
    if rel.direction == 'in':
        return f"<-{detail}-"
    return f"-{detail}-"
def format_pattern(pattern: PathPattern) -> str:
    parts = [format_node(pattern.nodes[0])]
    for rel, node in zip(pattern.rels, pattern.nodes[1:]):
        parts.append(format_rel(rel))
        parts.append(format_node(node))
    return ''.join(parts)
def _format_projection(keyword: str, clause) -> str:
    items = []
    for item in clause.items:
        text = format_expr(item.expr)
        items.append(f"{text} AS {item.alias}" if item.alias else text)
    out = keyword + (' DISTINCT' if clause.distinct else '') + ' ' + ', '.join(items)
    if clause.order_by:
        out += ' ORDER BY ' + ', '.join(_format_sort(s) for s in clause.order_by)
    if clause.limit is not None:
        out += f" LIMIT {format_expr(clause.limit)}"
    return out
def _format_sort(item: SortItem) -> str:
    return format_expr(item.expr) + (' DESC' if item.descending else '')
def format_clause(clause) -> str:
    if isinstance(clause, Match):
        return ('OPTIONAL MATCH ' if clause.optional else 'MATCH ') + format_pattern(clause.pattern)
    if isinstance(clause, Where):
        return f"WHERE {format_expr(clause.expr)}"
    if isinstance(clause, With):
        return _format_projection('WITH', clause)
    if isinstance(clause, Unwind):
        return f"UNWIND {format_expr(clause.expr)} AS {clause.alias}"
    if isinstance(clause, Return):
        return _format_projection('RETURN', clause)
    raise TypeError(f"not a clause: {clause!r}")
def format_query(ast: QueryAst) -> str:
    """One clause per line"""
    return '\n'.join(format_clause(c) for c in ast.clauses)
def column_name(item: ProjectionItem) -> str:
    """Result column name: the alias, otherwise the expression text"""
    return item.alias if item.alias else format_expr(item.expr)
