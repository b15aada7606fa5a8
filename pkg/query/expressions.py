# query/expressions.py
"""Row-at-a-time expression evaluation against a read transaction."""
import logging
from typing import Any, Dict, Mapping, Optional
import numpy as np
from .errors import QueryError, TypeMismatch
from .query_ast import (AGGREGATE_FUNCTIONS, Add, And, Comparison, FunctionCall, HasLabel, In, Index, ListLiteral,
                        Literal, Not, Or, Parameter, Property, Reduce, Variable)
from .values import EdgeRef, NodeRef, is_list, is_number, type_name, values_equal
logger = logging.getLogger(__name__)
ID_KEY = 'id'
def _truth(value: Any, what: str) -> Optional[bool]:
    if value is None:
        return None
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    raise TypeMismatch(f"{what} expects a boolean, got {type_name(value)}")
class Evaluator:
    """Evaluates expressions for one query execution.

    `rng` is the per-query generator behind rand(); every store access is
    charged both to the transaction and to the `charge` counters of the
    operator doing the evaluation.
    """
    def __init__(self, tx, params: Mapping[str, Any], rng: np.random.Generator):
        self.tx = tx
        self.params = params
        self.rng = rng
    def evaluate(self, expr, row: Dict[str, Any], charge=None) -> Any:
        method = getattr(self, '_eval_' + type(expr).__name__, None)
        if method is None:
            raise QueryError(f"cannot evaluate {type(expr).__name__}")
        return method(expr, row, charge)
    def predicate(self, expr, row: Dict[str, Any], charge=None) -> bool:
        """Filter semantics: null counts as false"""
        return _truth(self.evaluate(expr, row, charge), 'WHERE') is True
    def _eval_Variable(self, expr: Variable, row, charge):
        return row.get(expr.name)
    def _eval_Parameter(self, expr: Parameter, row, charge):
        return self.params[expr.name]
    def _eval_Literal(self, expr: Literal, row, charge):
        return expr.value
    def _eval_ListLiteral(self, expr: ListLiteral, row, charge):
        return [self.evaluate(item, row, charge) for item in expr.items]
    def _eval_Property(self, expr: Property, row, charge):
        subject = self.evaluate(expr.subject, row, charge)
        if subject is None:
            return None
        if isinstance(subject, NodeRef):
            return self.tx.get_property(subject.node_id, expr.key, charge)
        if isinstance(subject, EdgeRef):
            return self.tx.edge_properties(subject.edge_id, charge).get(expr.key)
        raise TypeMismatch(f"cannot read property `{expr.key}` of a {type_name(subject)}")
    def _eval_Index(self, expr: Index, row, charge):
        subject = self.evaluate(expr.subject, row, charge)
        index = self.evaluate(expr.index, row, charge)
        if subject is None or index is None:
            return None
        if not is_list(subject):
            raise TypeMismatch(f"cannot index into a {type_name(subject)}")
        if not is_number(index) or isinstance(index, (float, np.floating)):
            raise TypeMismatch(f"list index must be an integer, got {type_name(index)}")
        index = int(index)
        if -len(subject) <= index < len(subject):
            item = subject[index]
            return float(item) if isinstance(item, np.floating) else item
        return None
    def _eval_HasLabel(self, expr: HasLabel, row, charge):
        subject = self.evaluate(expr.subject, row, charge)
        if subject is None:
            return None
        if not isinstance(subject, NodeRef):
            raise TypeMismatch(f"label test on a {type_name(subject)}")
        return self.tx.has_label(subject.node_id, expr.label, charge)
    def _eval_FunctionCall(self, expr: FunctionCall, row, charge):
        name = expr.name
        if name in AGGREGATE_FUNCTIONS:
            raise QueryError(f"{name}() is only valid as an aggregate projection")
        if name == 'rand':
            return float(self.rng.random())
        arg = self.evaluate(expr.args[0], row, charge)
        if arg is None:
            return None
        if name == 'labels':
            self._require(arg, NodeRef, name)
            return self.tx.node_labels(arg.node_id, charge)
        if name == 'keys':
            if isinstance(arg, NodeRef):
                return list(self.tx.node_properties(arg.node_id, charge))
            self._require(arg, EdgeRef, name)
            return list(self.tx.edge_properties(arg.edge_id, charge))
        if name == 'type':
            self._require(arg, EdgeRef, name)
            return self.tx.edge_type(arg.edge_id, charge)
        if name == 'id':
            # the user-facing id property, same as n.id
            if isinstance(arg, NodeRef):
                return self.tx.get_property(arg.node_id, ID_KEY, charge)
            self._require(arg, EdgeRef, name)
            return arg.edge_id
        raise QueryError(f"unknown function {name}()")
    @staticmethod
    def _require(value, kind, function: str):
        if not isinstance(value, kind):
            raise TypeMismatch(f"{function}() does not accept a {type_name(value)}")
    def _eval_Reduce(self, expr: Reduce, row, charge):
        accumulator = self.evaluate(expr.init, row, charge)
        source = self.evaluate(expr.source, row, charge)
        if source is None:
            return None
        if not is_list(source):
            raise TypeMismatch(f"reduce() iterates a list, got {type_name(source)}")
        scope = dict(row)
        for item in source:
            scope[expr.accumulator] = accumulator
            scope[expr.variable] = item
            accumulator = self.evaluate(expr.body, scope, charge)
        return accumulator
    def _eval_In(self, expr: In, row, charge):
        container = self.evaluate(expr.container, row, charge)
        if container is None:
            return None
        if not is_list(container):
            raise TypeMismatch(f"IN expects a list, got {type_name(container)}")
        item = self.evaluate(expr.item, row, charge)
        if item is None:
            return None if len(container) else False
        saw_null = False
        for candidate in container:
            eq = values_equal(item, candidate, strict=False)
            if eq:
                return True
            if eq is None:
                saw_null = True
        return None if saw_null else False
    def _eval_Comparison(self, expr: Comparison, row, charge):
        eq = values_equal(self.evaluate(expr.left, row, charge), self.evaluate(expr.right, row, charge))
        if eq is None:
            return None
        return eq if expr.op == '=' else not eq
    def _eval_Not(self, expr: Not, row, charge):
        value = _truth(self.evaluate(expr.operand, row, charge), 'NOT')
        return None if value is None else not value
    def _eval_And(self, expr: And, row, charge):
        left = _truth(self.evaluate(expr.left, row, charge), 'AND')
        if left is False:
            return False
        right = _truth(self.evaluate(expr.right, row, charge), 'AND')
        if right is False:
            return False
        return None if left is None or right is None else True
    def _eval_Or(self, expr: Or, row, charge):
        left = _truth(self.evaluate(expr.left, row, charge), 'OR')
        if left is True:
            return True
        right = _truth(self.evaluate(expr.right, row, charge), 'OR')
        if right is True:
            return True
        return None if left is None or right is None else False
    def _eval_Add(self, expr: Add, row, charge):
        left = self.evaluate(expr.left, row, charge)
        right = self.evaluate(expr.right, row, charge)
        if left is None or right is None:
            return None
        if is_list(left) and is_list(right):
            return list(left) + list(right)
        if is_list(left):
            return list(left) + [right]
        if is_list(right):
            return [left] + list(right)
        if is_number(left) and is_number(right):
            return left + right
        if isinstance(left, str) and isinstance(right, str):
            return left + right
        raise TypeMismatch(f"cannot add {type_name(left)} and {type_name(right)}")
