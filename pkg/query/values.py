# query/values.py
"""
Runtime values flowing through operator rows.

A row is a plain dict of column name to value; values are None (null),
bool, int, float, str, list, float64 ndarray (vectors), NodeRef or EdgeRef.
"""
from dataclasses import dataclass
from typing import Any, Optional
import numpy as np
from .errors import TypeMismatch
@dataclass(frozen=True)
class NodeRef:
    node_id: int
    def __str__(self):
        return f"({self.node_id})"
@dataclass(frozen=True)
class EdgeRef:
    edge_id: int
    def __str__(self):
        return f"[{self.edge_id}]"
_NUMBER = (int, float, np.integer, np.floating)
def is_number(value: Any) -> bool:
    return isinstance(value, _NUMBER) and not isinstance(value, (bool, np.bool_))
def is_list(value: Any) -> bool:
    return isinstance(value, (list, tuple, np.ndarray))
def type_name(value: Any) -> str:
    if value is None:
        return 'null'
    if isinstance(value, (bool, np.bool_)):
        return 'boolean'
    if is_number(value):
        return 'number'
    if isinstance(value, str):
        return 'string'
    if is_list(value):
        return 'list'
    if isinstance(value, NodeRef):
        return 'node'
    if isinstance(value, EdgeRef):
        return 'relationship'
    return type(value).__name__
def values_equal(left: Any, right: Any, strict: bool = True) -> Optional[bool]:
    """Cypher equality: null if either side is null.

    With `strict`, comparing values of different kinds (a string with a
    number, say) raises TypeMismatch; otherwise such pairs are just unequal.
    """
    if left is None or right is None:
        return None
    left_kind, right_kind = type_name(left), type_name(right)
    if left_kind != right_kind:
        if strict:
            raise TypeMismatch(f"cannot compare {left_kind} with {right_kind}")
        return False
    if left_kind == 'list':
        if len(left) != len(right):
            return False
        saw_null = False
        for a, b in zip(left, right):
            eq = values_equal(a, b, strict=False)
            if eq is None:
                saw_null = True
            elif not eq:
                return False
        return None if saw_null else True
    return bool(left == right)
def hashable_key(value: Any):
    """Grouping key: equal values map to equal keys"""
    if value is None:
        return ('null',)
    if isinstance(value, (bool, np.bool_)):
        return ('bool', bool(value))
    if is_number(value):
        return ('number', float(value) if isinstance(value, (float, np.floating)) else int(value))
    if isinstance(value, str):
        return ('string', value)
    if isinstance(value, NodeRef):
        return ('node', value.node_id)
    if isinstance(value, EdgeRef):
        return ('edge', value.edge_id)
    if is_list(value):
        return ('list', tuple(hashable_key(v) for v in value))
    raise TypeMismatch(f"cannot group by {type(value).__name__}")
# ascending order across kinds; null sorts last
_KIND_RANK = {'node': 0, 'relationship': 1, 'list': 2, 'string': 3, 'boolean': 4, 'number': 5, 'null': 9}
def sort_key(value: Any):
    kind = type_name(value)
    rank = _KIND_RANK.get(kind, 8)
    if value is None:
        return (rank,)
    if kind == 'list':
        return (rank, tuple(sort_key(v) for v in value))
    if kind == 'node':
        return (rank, value.node_id)
    if kind == 'relationship':
        return (rank, value.edge_id)
    if kind == 'number':
        return (rank, float(value))
    if kind == 'boolean':
        return (rank, bool(value))
    return (rank, value)
class Descending:
    """Inverts the ordering of a wrapped sort key"""
    __slots__ = ('key',)
    def __init__(self, key):
        self.key = key
    def __lt__(self, other: "Descending"):
        return other.key < self.key
    def __eq__(self, other):
        return isinstance(other, Descending) and self.key == other.key
    def __hash__(self):
        return hash(self.key)
def format_value(value: Any) -> str:
    """Text rendering used by the CLI: null token, bracketed vectors"""
    if value is None:
        return 'null'
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, np.ndarray):
        return '[' + ', '.join(repr(float(v)) for v in value) + ']'
    if isinstance(value, (list, tuple)):
        return '[' + ', '.join(format_value(v) for v in value) + ']'
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)
