# query/parser.py
"""
Cypher subset parser built on a lark LALR grammar.

Covered: MATCH / OPTIONAL MATCH path patterns, WHERE, WITH [DISTINCT],
UNWIND, RETURN [DISTINCT], ORDER BY, LIMIT, and the expression forms the
sampling and metadata queries use. Keywords are case-insensitive,
identifiers case-sensitive. Anything else is a QuerySyntaxError.
"""
import re
import logging
from typing import Any, List
from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedCharacters, UnexpectedInput, UnexpectedToken, VisitError
from .errors import QuerySyntaxError
from .query_ast import (FUNCTION_ARITY, Add, And, Comparison, FunctionCall, In, Index, ListLiteral, Literal,
                        Match, NodePattern, Not, Or, Parameter, PathPattern, ProjectionItem, Property,
                        QueryAst, Reduce, RelPattern, Return, SortItem, Unwind, Variable, Where, With)
logger = logging.getLogger(__name__)
CYPHER_GRAMMAR = r"""
query: clause+ ";"?

?clause: match_clause
       | optional_match_clause
       | where_clause
       | with_clause
       | unwind_clause
       | return_clause

match_clause: _MATCH pattern
optional_match_clause: _OPTIONAL _MATCH pattern
where_clause: _WHERE expr
with_clause: _WITH distinct_flag projection_items order_by? limit_clause?
unwind_clause: _UNWIND expr _AS NAME
return_clause: _RETURN distinct_flag projection_items order_by? limit_clause?

distinct_flag: DISTINCT?
projection_items: projection_item ("," projection_item)*
projection_item: expr (_AS NAME)?
order_by: _ORDER _BY sort_item ("," sort_item)*
sort_item: expr sort_direction?
sort_direction: ASC | DESC
limit_clause: _LIMIT expr

pattern: node_pattern (rel_pattern node_pattern)*
node_pattern: "(" NAME? node_label* ")"
node_label: ":" label_name
?label_name: NAME | PARAM
rel_pattern: "-" rel_detail? "->"    -> rel_out
           | "<-" rel_detail? "-"    -> rel_in
           | "-" rel_detail? "-"     -> rel_both
rel_detail: "[" NAME? rel_type? "]"
rel_type: ":" label_name

?expr: or_expr
?or_expr: and_expr
        | or_expr _OR and_expr              -> or_op
?and_expr: not_expr
         | and_expr _AND not_expr           -> and_op
?not_expr: comparison
         | _NOT not_expr                    -> not_op
?comparison: add_expr
           | add_expr "=" add_expr          -> eq_op
           | add_expr "<>" add_expr         -> neq_op
           | add_expr _IN add_expr          -> in_op
?add_expr: postfix
         | add_expr "+" postfix             -> add_op
?postfix: atom
        | postfix "." NAME                  -> property
        | postfix "[" expr "]"              -> index
?atom: literal
     | PARAM                                -> parameter
     | NAME                                 -> variable
     | function_call
     | reduce_expr
     | list_literal
     | "(" expr ")"
function_call: NAME "(" DISTINCT? args? ")"
args: expr ("," expr)*
reduce_expr: _REDUCE "(" NAME "=" expr "," NAME _IN expr "|" expr ")"
list_literal: "[" (expr ("," expr)*)? "]"
?literal: STRING                            -> string
        | NUMBER                            -> number
        | _TRUE                             -> true
        | _FALSE                            -> false
        | _NULL                             -> null

_MATCH.2: /match\b/i
_OPTIONAL.2: /optional\b/i
_WHERE.2: /where\b/i
_WITH.2: /with\b/i
_UNWIND.2: /unwind\b/i
_RETURN.2: /return\b/i
_AS.2: /as\b/i
_ORDER.2: /order\b/i
_BY.2: /by\b/i
_LIMIT.2: /limit\b/i
_AND.2: /and\b/i
_OR.2: /or\b/i
_NOT.2: /not\b/i
_IN.2: /in\b/i
_REDUCE.2: /reduce\b/i
_TRUE.2: /true\b/i
_FALSE.2: /false\b/i
_NULL.2: /null\b/i
DISTINCT.2: /distinct\b/i
ASC.2: /asc(ending)?\b/i
DESC.2: /desc(ending)?\b/i
NAME: /[A-Za-z_][A-Za-z0-9_]*/
PARAM: /\$[A-Za-z_][A-Za-z0-9_]*/
NUMBER: /\d+(\.\d+)?([eE][+-]?\d+)?/
STRING: /'(?:[^'\\]|\\.)*'/ | /"(?:[^"\\]|\\.)*"/
COMMENT: /\/\/[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""
_ESCAPES = {'n': '\n', 't': '\t', 'r': '\r', '\\': '\\', "'": "'", '"': '"'}
class _Label:
    def __init__(self, value):
        self.value = value
class _RelType:
    def __init__(self, value):
        self.value = value
class _OrderBy:
    def __init__(self, items):
        self.items = tuple(items)
class _Limit:
    def __init__(self, expr):
        self.expr = expr
class _Detail:
    def __init__(self, variable, rel_type):
        self.variable = variable
        self.rel_type = rel_type
def _label_value(token: Token):
    if token.type == 'PARAM':
        return Parameter(str(token)[1:])
    return str(token)
def _unescape(text: str) -> str:
    return re.sub(r'\\(.)', lambda m: _ESCAPES.get(m.group(1), m.group(1)), text)
class CypherTransformer(Transformer):
    """Turns the lark parse tree into query_ast dataclasses"""
    def query(self, items):
        return QueryAst(tuple(items))
    def match_clause(self, items):
        return Match(items[0], optional=False)
    def optional_match_clause(self, items):
        return Match(items[0], optional=True)
    def where_clause(self, items):
        return Where(items[0])
    def _projection(self, items):
        distinct, projections = items[0], items[1]
        order_by, limit = (), None
        for extra in items[2:]:
            if isinstance(extra, _OrderBy):
                order_by = extra.items
            elif isinstance(extra, _Limit):
                limit = extra.expr
        return distinct, projections, order_by, limit
    def with_clause(self, items):
        distinct, projections, order_by, limit = self._projection(items)
        return With(projections, distinct, order_by, limit)
    def return_clause(self, items):
        distinct, projections, order_by, limit = self._projection(items)
        return Return(projections, distinct, order_by, limit)
    def unwind_clause(self, items):
        return Unwind(items[0], str(items[1]))
    def distinct_flag(self, items):
        return bool(items)
    def projection_items(self, items):
        return tuple(items)
    def projection_item(self, items):
        return ProjectionItem(items[0], str(items[1]) if len(items) > 1 else None)
    def order_by(self, items):
        return _OrderBy(items)
    def sort_item(self, items):
        return SortItem(items[0], descending=bool(items[1]) if len(items) > 1 else False)
    def sort_direction(self, items):
        return items[0].type == 'DESC'
    def limit_clause(self, items):
        return _Limit(items[0])
    def pattern(self, items):
        return PathPattern(nodes=tuple(items[0::2]), rels=tuple(items[1::2]))
    def node_pattern(self, items):
        variable = None
        labels = []
        for item in items:
            if isinstance(item, Token) and item.type == 'NAME':
                variable = str(item)
            elif isinstance(item, _Label):
                labels.append(item.value)
        return NodePattern(variable, tuple(labels))
    def node_label(self, items):
        return _Label(_label_value(items[0]))
    def rel_type(self, items):
        return _RelType(_label_value(items[0]))
    def rel_detail(self, items):
        variable = None
        rel_type = None
        for item in items:
            if isinstance(item, Token) and item.type == 'NAME':
                variable = str(item)
            elif isinstance(item, _RelType):
                rel_type = item.value
        return _Detail(variable, rel_type)
    def _rel(self, items, direction):
        detail = items[0] if items else _Detail(None, None)
        return RelPattern(detail.variable, detail.rel_type, direction)
    def rel_out(self, items):
        return self._rel(items, 'out')
    def rel_in(self, items):
        return self._rel(items, 'in')
    def rel_both(self, items):
        return self._rel(items, 'both')
    def or_op(self, items):
        return Or(items[0], items[1])
    def and_op(self, items):
        return And(items[0], items[1])
    def not_op(self, items):
        return Not(items[0])
    def eq_op(self, items):
        return Comparison('=', items[0], items[1])
    def neq_op(self, items):
        return Comparison('<>', items[0], items[1])
    def in_op(self, items):
        return In(items[0], items[1])
    def add_op(self, items):
        return Add(items[0], items[1])
    def property(self, items):
        return Property(items[0], str(items[1]))
    def index(self, items):
        return Index(items[0], items[1])
    def parameter(self, items):
        return Parameter(str(items[0])[1:])
    def variable(self, items):
        return Variable(str(items[0]))
    def function_call(self, items):
        name_token = items[0]
        name = str(name_token).lower()
        distinct = False
        args = ()
        for item in items[1:]:
            if isinstance(item, Token) and item.type == 'DISTINCT':
                distinct = True
            elif isinstance(item, tuple):
                args = item
        arity = FUNCTION_ARITY.get(name)
        if arity is None:
            raise QuerySyntaxError(f"unknown function {name_token}()", name_token.line, name_token.column,
                                   sorted(FUNCTION_ARITY))
        if len(args) != arity:
            raise QuerySyntaxError(f"{name}() takes {arity} argument(s), got {len(args)}",
                                   name_token.line, name_token.column)
        if distinct and name != 'collect':
            raise QuerySyntaxError(f"DISTINCT is only supported inside collect()",
                                   name_token.line, name_token.column)
        return FunctionCall(name, args, distinct)
    def args(self, items):
        return tuple(items)
    def reduce_expr(self, items):
        accumulator, init, variable, source, body = items
        return Reduce(str(accumulator), init, str(variable), source, body)
    def list_literal(self, items):
        return ListLiteral(tuple(items))
    def string(self, items):
        return Literal(_unescape(str(items[0])[1:-1]))
    def number(self, items):
        text = str(items[0])
        if any(ch in text for ch in '.eE'):
            return Literal(float(text))
        return Literal(int(text))
    def true(self, items):
        return Literal(True)
    def false(self, items):
        return Literal(False)
    def null(self, items):
        return Literal(None)
class CypherParser:
    """LALR parser plus AST transformer; instances are safe to share between threads"""
    def __init__(self):
        self._lark = Lark(CYPHER_GRAMMAR, start='query', parser='lalr', lexer='contextual')
        self._transformer = CypherTransformer()
    def _describe(self, terminal: str) -> str:
        if terminal == '$END':
            return 'end of input'
        try:
            pattern = self._lark.get_terminal(terminal).pattern
            if pattern.type == 'str':
                return repr(pattern.value)
        except KeyError:
            pass
        return terminal.lstrip('_')
    def parse(self, text: str) -> QueryAst:
        if isinstance(text, bytes):
            text = text.decode('utf-8')
        try:
            tree = self._lark.parse(text)
        except UnexpectedInput as e:
            raise self._syntax_error(text, e) from None
        try:
            return self._transformer.transform(tree)
        except VisitError as e:
            if isinstance(e.orig_exc, QuerySyntaxError):
                raise e.orig_exc from None
            raise
    def _syntax_error(self, text: str, e: UnexpectedInput) -> QuerySyntaxError:
        line = getattr(e, 'line', None)
        column = getattr(e, 'column', None)
        if line in (None, -1) or column in (None, -1):
            lines = text.split('\n')
            line, column = len(lines), len(lines[-1]) + 1
        expected: List[Any] = list(getattr(e, 'expected', None) or getattr(e, 'allowed', None) or ())
        names = [self._describe(t) for t in expected]
        if isinstance(e, UnexpectedToken):
            if e.token.type == '$END':
                message = "unexpected end of input"
            else:
                message = f"unexpected {str(e.token)!r}"
        elif isinstance(e, UnexpectedCharacters):
            message = f"unexpected character {e.char!r}"
        else:
            message = "unexpected input"
        return QuerySyntaxError(message, line, column, names)
_default_parser = None
def get_parser() -> CypherParser:
    global _default_parser
    if _default_parser is None:
        _default_parser = CypherParser()
    return _default_parser
def parse(text: str) -> QueryAst:
    """Parse query text into a QueryAst"""
    return get_parser().parse(text)
