"""
Cypher subset front end and execution engine for Graph Training DB
"""
from .errors import (QueryError, QuerySyntaxError, MissingParameter, TypeMismatch, UnboundVariable,
                     UnsupportedConstruct, ExecutionError)
from .query_ast import QueryAst
from .parser import CypherParser, parse
from .printer import format_expr, format_query
from .binder import BoundQuery, bind
from .values import NodeRef, EdgeRef, format_value
from .planner import plan
from .executor import QueryEngine, QueryResult, execute, profile, query_rng
from .profiler import ProfileTree, ProfileRow, render_plan, render_profile
__all__ = ['QueryError', 'QuerySyntaxError', 'MissingParameter', 'TypeMismatch', 'UnboundVariable',
           'UnsupportedConstruct', 'ExecutionError', 'QueryAst', 'CypherParser', 'parse', 'format_expr',
           'format_query', 'BoundQuery', 'bind', 'NodeRef', 'EdgeRef', 'format_value', 'plan', 'QueryEngine',
           'QueryResult', 'execute', 'profile', 'query_rng', 'ProfileTree', 'ProfileRow', 'render_plan',
           'render_profile']
