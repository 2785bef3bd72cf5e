"""The computable care protocol: stages, actions, constraints, weights.

A protocol file is a JSON document.  Sibling weight groups may be
authored either as percentages (summing near 100, as weight tables are
usually published) or as fractions (summing near 1); the parser detects
which convention a group uses, rejects groups whose sum is outside the
tolerated drift band, and renormalizes so every group sums to exactly 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Union

from .conditions import ConditionExpr, condition_to_json, parse_condition, referenced_concepts
from .errors import SchemaError, UnknownConcept, ValidationError
from .trapezoid import Trapezoid

WEIGHT_TOL = 1e-9

COMPONENT_KINDS = ("command", "performance", "frequency", "order")

CONCEPT_KINDS = ("action", "instruction", "observation")


# --------------------------------------------------------------------------
# constraint variants


@dataclass(frozen=True)
class Binary:
    # event_kind "instruction" turns this into a was-the-order-given check
    # (the "command" component of an action)
    event_kind: str = "performance"
    kind: str = field(default="binary", init=False)


@dataclass(frozen=True)
class Cyclical:
    expected_cardinality: int
    window_hours: float
    calculation: str = "proportional"  # or "fuzzy"
    trapezoid: Optional[Trapezoid] = None
    kind: str = field(default="cyclical", init=False)


@dataclass(frozen=True)
class Time:
    reference_event: str  # concept code, or "stage-entry"
    trapezoid: Trapezoid = None
    kind: str = field(default="time", init=False)


@dataclass(frozen=True)
class EntryCondition:
    condition: ConditionExpr
    kind: str = field(default="entry_condition", init=False)


@dataclass(frozen=True)
class Order:
    must_follow: str
    max_lag_hours: Optional[float] = None
    # restrict matching precursor events to one kind; required when the
    # precursor shares the action's own concept code (its instruction)
    must_follow_kind: Optional[str] = None
    kind: str = field(default="order", init=False)


@dataclass(frozen=True)
class Multiple:
    conditions: tuple
    kind: str = field(default="multiple", init=False)


@dataclass(frozen=True)
class CombinationPart:
    constraint: "ConstraintSpec"
    weight: float
    component: Optional[str] = None  # one of COMPONENT_KINDS, for drill-down labels
    concept: Optional[str] = None  # overrides the action's concept for this part


@dataclass(frozen=True)
class Combination:
    parts: tuple
    kind: str = field(default="combination", init=False)


ConstraintSpec = Union[Binary, Cyclical, Time, EntryCondition, Order, Multiple, Combination]


# --------------------------------------------------------------------------
# protocol hierarchy


@dataclass(frozen=True)
class Concept:
    code: str
    kind: str  # action | instruction | observation
    value_type: Optional[str] = None


@dataclass(frozen=True)
class ActionSpec:
    id: str
    name: str
    concept: str
    weight: float
    constraint: ConstraintSpec
    comment: Optional[str] = None  # e.g. flags a weight resolved by the equal-share rule


@dataclass(frozen=True)
class Stage:
    id: str
    name: str
    weight: float
    actions: tuple
    entry_condition: Optional[ConditionExpr] = None


@dataclass(frozen=True)
class Protocol:
    id: str
    name: str
    version: str
    concepts: tuple
    stages: tuple

    def concept_codes(self) -> set[str]:
        return {c.code for c in self.concepts}

    def stage(self, stage_id: str) -> Stage:
        for s in self.stages:
            if s.id == stage_id:
                return s
        raise KeyError(stage_id)

    def actions(self):
        """Iterate (stage, action) pairs across the whole protocol."""
        for s in self.stages:
            for a in s.actions:
                yield s, a


# --------------------------------------------------------------------------
# weight handling


def normalize_weights(raw: list[float], path: str) -> list[float]:
    """Map a sibling weight group, percent or fraction, to fractions summing to 1."""
    if not raw:
        raise ValidationError("empty weight group", path)
    for i, w in enumerate(raw):
        if w < 0:
            raise ValidationError(f"negative weight {w}", f"{path}[{i}]")
    total = sum(raw)
    if 98.0 <= total <= 102.0:
        fractions = [w / 100.0 for w in raw]
    elif 0.98 <= total <= 1.02:
        fractions = list(raw)
    else:
        raise ValidationError(
            f"sibling weights sum to {total:g}; expected near 1 or near 100", path
        )
    s = sum(fractions)
    if abs(s - 1.0) <= 1e-12:
        # already exact; leaving values untouched keeps re-parsing stable
        return fractions
    return [w / s for w in fractions]


def check_weight_group(weights: list[float], path: str) -> None:
    if weights and abs(sum(weights) - 1.0) > WEIGHT_TOL:
        raise ValidationError(f"weights sum to {sum(weights)!r}, not 1", path)


# --------------------------------------------------------------------------
# parsing


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise SchemaError(f"missing required field {key!r}", path)
    return obj[key]


def _parse_constraint(obj: dict, codes: set[str], path: str) -> ConstraintSpec:
    if not isinstance(obj, dict):
        raise SchemaError("constraint must be an object", path)
    kind = _require(obj, "kind", path)
    if kind == "binary":
        event_kind = obj.get("event_kind", "performance")
        if event_kind not in ("instruction", "performance", "observation"):
            raise SchemaError(f"unknown event_kind {event_kind!r}", path)
        return Binary(event_kind)
    if kind == "cyclical":
        n = _require(obj, "expected_cardinality", path)
        window = _require(obj, "window", path)
        calc = obj.get("calculation", "proportional")
        if calc not in ("proportional", "fuzzy"):
            raise SchemaError(f"unknown calculation {calc!r}", path)
        if not isinstance(n, int) or n < 1:
            raise ValidationError("expected_cardinality must be an integer >= 1", path)
        if not window > 0:
            raise ValidationError("window must be > 0", path)
        trap = None
        if "trapezoid" in obj:
            trap = Trapezoid.from_json(obj["trapezoid"])
        if calc == "fuzzy" and trap is None:
            raise ValidationError("fuzzy cyclical constraint requires a trapezoid", path)
        return Cyclical(n, float(window), calc, trap)
    if kind == "time":
        ref = _require(obj, "reference_event", path)
        if ref != "stage-entry" and ref not in codes:
            raise UnknownConcept(f"reference_event {ref!r} not declared", path)
        return Time(ref, Trapezoid.from_json(_require(obj, "trapezoid", path)))
    if kind == "entry_condition":
        cond = parse_condition(_require(obj, "condition", path), f"{path}.condition")
        _check_condition_concepts(cond, codes, f"{path}.condition")
        return EntryCondition(cond)
    if kind == "order":
        ref = _require(obj, "must_follow", path)
        if ref not in codes:
            raise UnknownConcept(f"must_follow {ref!r} not declared", path)
        lag = obj.get("max_lag")
        follow_kind = obj.get("must_follow_kind")
        if follow_kind is not None and follow_kind not in ("instruction", "performance", "observation"):
            raise SchemaError(f"unknown must_follow_kind {follow_kind!r}", path)
        return Order(ref, float(lag) if lag is not None else None, follow_kind)
    if kind == "multiple":
        raw = _require(obj, "conditions", path)
        if not raw:
            raise ValidationError("multiple constraint needs at least one condition", path)
        conds = []
        for i, c in enumerate(raw):
            cond = parse_condition(c, f"{path}.conditions[{i}]")
            _check_condition_concepts(cond, codes, f"{path}.conditions[{i}]")
            conds.append(cond)
        return Multiple(tuple(conds))
    if kind == "combination":
        raw = _require(obj, "parts", path)
        if not raw:
            raise ValidationError("combination parts must be non-empty", path)
        weights = normalize_weights(
            [_require(p, "weight", f"{path}.parts[{i}]") for i, p in enumerate(raw)],
            f"{path}.parts",
        )
        parts = []
        for i, (p, w) in enumerate(zip(raw, weights)):
            component = p.get("component")
            if component is not None and component not in COMPONENT_KINDS:
                raise SchemaError(f"unknown component kind {component!r}", f"{path}.parts[{i}]")
            part_concept = p.get("concept")
            if part_concept is not None and part_concept not in codes:
                raise UnknownConcept(f"part concept {part_concept!r} not declared", f"{path}.parts[{i}]")
            sub = _parse_constraint(
                _require(p, "constraint", f"{path}.parts[{i}]"), codes, f"{path}.parts[{i}].constraint"
            )
            parts.append(CombinationPart(sub, w, component, part_concept))
        return Combination(tuple(parts))
    raise SchemaError(f"unknown constraint kind {kind!r}", path)


def _check_condition_concepts(cond: ConditionExpr, codes: set[str], path: str) -> None:
    missing = referenced_concepts(cond) - codes
    if missing:
        raise UnknownConcept(f"condition references undeclared concepts {sorted(missing)}", path)


def parse_protocol(source: Union[str, Path, dict]) -> Protocol:
    """Parse and validate a protocol document.

    ``source`` may be a path, a JSON string, or an already-decoded dict.
    """
    if isinstance(source, Path):
        doc = json.loads(source.read_text(encoding="utf-8"))
    elif isinstance(source, str):
        p = Path(source)
        if p.suffix == ".json" and p.exists():
            doc = json.loads(p.read_text(encoding="utf-8"))
        else:
            doc = json.loads(source)
    elif isinstance(source, dict):
        doc = source
    else:
        raise SchemaError(f"unsupported source type {type(source).__name__}")
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")

    concepts = []
    seen_codes: set[str] = set()
    for i, c in enumerate(doc.get("concepts", [])):
        path = f"$.concepts[{i}]"
        code = _require(c, "code", path)
        kind = _require(c, "kind", path)
        if kind not in CONCEPT_KINDS:
            raise SchemaError(f"unknown concept kind {kind!r}", path)
        if code in seen_codes:
            raise ValidationError(f"duplicate concept code {code!r}", path)
        seen_codes.add(code)
        concepts.append(Concept(code, kind, c.get("value_type")))
    codes = set(seen_codes)

    raw_stages = _require(doc, "stages", "$")
    if not raw_stages:
        raise ValidationError("protocol must declare at least one stage", "$.stages")
    stage_weights = normalize_weights(
        [_require(s, "weight", f"$.stages[{i}]") for i, s in enumerate(raw_stages)], "$.stages"
    )
    stages = []
    stage_ids: set[str] = set()
    for i, (s, sw) in enumerate(zip(raw_stages, stage_weights)):
        spath = f"$.stages[{i}]"
        sid = _require(s, "id", spath)
        if sid in stage_ids:
            raise ValidationError(f"duplicate stage id {sid!r}", spath)
        stage_ids.add(sid)
        entry = None
        if s.get("entry_condition") is not None:
            entry = parse_condition(s["entry_condition"], f"{spath}.entry_condition")
            _check_condition_concepts(entry, codes, f"{spath}.entry_condition")
        raw_actions = _require(s, "actions", spath)
        if not raw_actions:
            raise ValidationError("stage must declare at least one action", f"{spath}.actions")
        action_weights = normalize_weights(
            [_require(a, "weight", f"{spath}.actions[{j}]") for j, a in enumerate(raw_actions)],
            f"{spath}.actions",
        )
        actions = []
        action_ids: set[str] = set()
        for j, (a, aw) in enumerate(zip(raw_actions, action_weights)):
            apath = f"{spath}.actions[{j}]"
            aid = _require(a, "id", apath)
            if aid in action_ids:
                raise ValidationError(f"duplicate action id {aid!r}", apath)
            action_ids.add(aid)
            concept = _require(a, "concept", apath)
            if concept not in codes:
                raise UnknownConcept(f"action concept {concept!r} not declared", apath)
            constraint = _parse_constraint(_require(a, "constraint", apath), codes, f"{apath}.constraint")
            actions.append(
                ActionSpec(aid, a.get("name", aid), concept, aw, constraint, a.get("comment"))
            )
        stages.append(Stage(sid, s.get("name", sid), sw, tuple(actions), entry))

    proto = Protocol(
        id=_require(doc, "id", "$"),
        name=doc.get("name", doc["id"]),
        version=str(doc.get("version", "1")),
        concepts=tuple(concepts),
        stages=tuple(stages),
    )
    check_weight_group([s.weight for s in proto.stages], "$.stages")
    for s in proto.stages:
        check_weight_group([a.weight for a in s.actions], f"$.stages[{s.id}].actions")
    return proto


# --------------------------------------------------------------------------
# serialization


def _constraint_to_json(c: ConstraintSpec) -> dict:
    if isinstance(c, Binary):
        out = {"kind": "binary"}
        if c.event_kind != "performance":
            out["event_kind"] = c.event_kind
        return out
    if isinstance(c, Cyclical):
        out = {
            "kind": "cyclical",
            "expected_cardinality": c.expected_cardinality,
            "window": c.window_hours,
            "calculation": c.calculation,
        }
        if c.trapezoid is not None:
            out["trapezoid"] = c.trapezoid.to_json()
        return out
    if isinstance(c, Time):
        return {"kind": "time", "reference_event": c.reference_event, "trapezoid": c.trapezoid.to_json()}
    if isinstance(c, EntryCondition):
        return {"kind": "entry_condition", "condition": condition_to_json(c.condition)}
    if isinstance(c, Order):
        out = {"kind": "order", "must_follow": c.must_follow}
        if c.max_lag_hours is not None:
            out["max_lag"] = c.max_lag_hours
        if c.must_follow_kind is not None:
            out["must_follow_kind"] = c.must_follow_kind
        return out
    if isinstance(c, Multiple):
        return {"kind": "multiple", "conditions": [condition_to_json(x) for x in c.conditions]}
    if isinstance(c, Combination):
        parts = []
        for p in c.parts:
            entry = {"weight": p.weight, "constraint": _constraint_to_json(p.constraint)}
            if p.component is not None:
                entry["component"] = p.component
            if p.concept is not None:
                entry["concept"] = p.concept
            parts.append(entry)
        return {"kind": "combination", "parts": parts}
    raise TypeError(f"not a constraint: {c!r}")


def protocol_to_json(proto: Protocol) -> dict:
    stages = []
    for s in proto.stages:
        actions = []
        for a in s.actions:
            entry = {
                "id": a.id,
                "name": a.name,
                "concept": a.concept,
                "weight": a.weight,
                "constraint": _constraint_to_json(a.constraint),
            }
            if a.comment is not None:
                entry["comment"] = a.comment
            actions.append(entry)
        stage = {"id": s.id, "name": s.name, "weight": s.weight, "actions": actions}
        if s.entry_condition is not None:
            stage["entry_condition"] = condition_to_json(s.entry_condition)
        stages.append(stage)
    return {
        "id": proto.id,
        "name": proto.name,
        "version": proto.version,
        "concepts": [
            {"code": c.code, "kind": c.kind, **({"value_type": c.value_type} if c.value_type else {})}
            for c in proto.concepts
        ],
        "stages": stages,
    }


def serialize_protocol(proto: Protocol) -> str:
    return json.dumps(protocol_to_json(proto), indent=2, sort_keys=False)
