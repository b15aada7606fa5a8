"""Query-layer exceptions."""
from typing import Iterable, Optional
class QueryError(Exception):
    """Base class for every parse, bind, plan and execution failure"""
class QuerySyntaxError(QueryError):
    def __init__(self, message: str, line: int, column: int, expected: Iterable[str] = ()):
        self.line = line
        self.column = column
        self.expected = sorted(set(expected))
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"line {line}, column {column}: {message}{detail}")
class MissingParameter(QueryError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"missing parameter ${name}")
class TypeMismatch(QueryError):
    pass
class UnboundVariable(QueryError):
    def __init__(self, name: str, clause: str):
        self.name = name
        super().__init__(f"variable `{name}` is not defined (in {clause})")
class UnsupportedConstruct(QueryError):
    pass
class ExecutionError(QueryError):
    """A failure inside an operator; `operator_id` matches the profile row"""
    def __init__(self, operator_id: Optional[int], operator: str, cause: Exception):
        self.operator_id = operator_id
        self.operator = operator
        self.cause = cause
        super().__init__(f"{operator} (id {operator_id}): {cause}")
