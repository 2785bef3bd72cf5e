"""Boolean condition expressions over observation values.

A condition is a tree of AND/OR/NOT nodes whose leaves compare the most
recently observed value of a concept against a constant.  Atoms with no
observed value yet evaluate to False.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .errors import SchemaError

_COMPARATORS = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


@dataclass(frozen=True)
class Atom:
    concept: str
    cmp: str
    value: Union[float, str]

    def __post_init__(self):
        if self.cmp not in _COMPARATORS:
            raise SchemaError(f"unknown comparator {self.cmp!r}")

    def holds(self, state: Mapping[str, object]) -> bool:
        if self.concept not in state:
            return False
        observed = state[self.concept]
        try:
            return _COMPARATORS[self.cmp](observed, self.value)
        except TypeError:
            return False


@dataclass(frozen=True)
class And:
    args: tuple

    def holds(self, state: Mapping[str, object]) -> bool:
        return all(arg.holds(state) for arg in self.args)


@dataclass(frozen=True)
class Or:
    args: tuple

    def holds(self, state: Mapping[str, object]) -> bool:
        return any(arg.holds(state) for arg in self.args)


@dataclass(frozen=True)
class Not:
    arg: object

    def holds(self, state: Mapping[str, object]) -> bool:
        return not self.arg.holds(state)


ConditionExpr = Union[Atom, And, Or, Not]


def parse_condition(obj: dict, path: str = "$") -> ConditionExpr:
    if not isinstance(obj, dict):
        raise SchemaError("condition node must be an object", path)
    if "concept" in obj:
        try:
            return Atom(obj["concept"], obj.get("cmp", "=="), obj["value"])
        except KeyError as exc:
            raise SchemaError(f"atom missing field {exc}", path) from None
    op = obj.get("op")
    if op == "and":
        return And(tuple(parse_condition(a, f"{path}.args[{i}]") for i, a in enumerate(obj.get("args", []))))
    if op == "or":
        return Or(tuple(parse_condition(a, f"{path}.args[{i}]") for i, a in enumerate(obj.get("args", []))))
    if op == "not":
        if "arg" not in obj:
            raise SchemaError("'not' node requires 'arg'", path)
        return Not(parse_condition(obj["arg"], f"{path}.arg"))
    raise SchemaError(f"unknown condition op {op!r}", path)


def condition_to_json(expr: ConditionExpr) -> dict:
    if isinstance(expr, Atom):
        return {"concept": expr.concept, "cmp": expr.cmp, "value": expr.value}
    if isinstance(expr, And):
        return {"op": "and", "args": [condition_to_json(a) for a in expr.args]}
    if isinstance(expr, Or):
        return {"op": "or", "args": [condition_to_json(a) for a in expr.args]}
    if isinstance(expr, Not):
        return {"op": "not", "arg": condition_to_json(expr.arg)}
    raise TypeError(f"not a condition node: {expr!r}")


def referenced_concepts(expr: ConditionExpr) -> set[str]:
    if isinstance(expr, Atom):
        return {expr.concept}
    if isinstance(expr, (And, Or)):
        out: set[str] = set()
        for a in expr.args:
            out |= referenced_concepts(a)
        return out
    if isinstance(expr, Not):
        return referenced_concepts(expr.arg)
    raise TypeError(f"not a condition node: {expr!r}")


def satisfying_assignment(expr: ConditionExpr) -> dict[str, object]:
    """A concept->value map under which the condition holds.

    Used by the synthetic-data generator.  NOT nodes are unsupported; the
    shipped protocols do not use them.
    """
    if isinstance(expr, Atom):
        if expr.cmp in ("==", "<=", ">="):
            return {expr.concept: expr.value}
        if expr.cmp == "<":
            return {expr.concept: expr.value - 1}
        if expr.cmp == ">":
            return {expr.concept: expr.value + 1}
        # != against a number: offset; against text: mangle
        if isinstance(expr.value, (int, float)):
            return {expr.concept: expr.value + 1}
        return {expr.concept: str(expr.value) + "_other"}
    if isinstance(expr, And):
        out: dict[str, object] = {}
        for a in expr.args:
            out.update(satisfying_assignment(a))
        return out
    if isinstance(expr, Or):
        return satisfying_assignment(expr.args[0])
    raise ValueError("cannot derive a satisfying assignment through NOT")


def falsifying_assignment(expr: ConditionExpr) -> dict[str, object]:
    """A concept->value map under which the condition does not hold.

    Used by the generator to close condition episodes.  NOT nodes are
    unsupported, matching :func:`satisfying_assignment`.
    """
    if isinstance(expr, Atom):
        if expr.cmp in ("==", "<=", "<"):
            if isinstance(expr.value, (int, float)):
                return {expr.concept: expr.value + 1}
            return {expr.concept: str(expr.value) + "_other"}
        if expr.cmp in (">=", ">"):
            return {expr.concept: expr.value - 1}
        return {expr.concept: expr.value}  # != falsified by equality
    if isinstance(expr, And):
        return falsifying_assignment(expr.args[0])
    if isinstance(expr, Or):
        out: dict[str, object] = {}
        for a in expr.args:
            out.update(falsifying_assignment(a))
        return out
    raise ValueError("cannot derive a falsifying assignment through NOT")
