"""Per-action compliance scores over a patient timeline and time window.

Every operation here is a pure function of (record, action, window).
Scores are in [0, 1]; a score is Undefined (value None) only when the
denominator of a proportional rule is empty, e.g. an entry condition
that never held.  Undefined scores are excluded from parent weighted
averages, with sibling weights renormalized over the defined ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from typing import Optional

from .conditions import ConditionExpr, Or, referenced_concepts
from .events import Event, PatientRecord
from .protocol import (
    ActionSpec,
    Binary,
    Combination,
    Cyclical,
    EntryCondition,
    Multiple,
    Order,
    Time,
)


@dataclass(frozen=True)
class Episode:
    """A maximal interval during which an entry condition held."""

    start: datetime
    end: datetime
    trigger: str


@dataclass(frozen=True)
class ActionScore:
    action_id: str
    value: Optional[float]  # None == Undefined
    numerator: float = 0.0
    denominator: float = 0.0
    components: tuple = ()  # (component kind, weight, value-or-None)
    evidence: tuple = ()
    reason: Optional[str] = None

    @property
    def defined(self) -> bool:
        return self.value is not None


def _clamp(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def _hours(delta) -> float:
    return delta.total_seconds() / 3600.0


# Per-record index of events grouped by concept, so scoring an action only
# scans that action's own events.  Keyed by id(); the strong reference keeps
# the key valid for the process lifetime.
_INDEX_CACHE: dict[int, tuple] = {}
_INDEX_CACHE_MAX = 4096


def _record_index(record: PatientRecord) -> dict:
    cached = _INDEX_CACHE.get(id(record))
    if cached is not None and cached[0] is record:
        return cached[1]
    by_concept: dict[str, list[Event]] = {}
    for e in record.events:
        by_concept.setdefault(e.concept, []).append(e)
    if len(_INDEX_CACHE) >= _INDEX_CACHE_MAX:
        _INDEX_CACHE.clear()
    _INDEX_CACHE[id(record)] = (record, by_concept)
    return by_concept


def _in_stay_window(record: PatientRecord, e: Event, start: datetime, end: datetime) -> bool:
    # events outside [admission, discharge] are retained by ingestion but
    # ignored by scoring
    if not (start <= e.timestamp < end):
        return False
    if e.timestamp < record.admission:
        return False
    if record.discharge is not None and e.timestamp > record.discharge:
        return False
    return True


def _concept_events(
    record: PatientRecord,
    concept: str,
    start: datetime,
    end: datetime,
    kind: Optional[str] = None,
) -> list[Event]:
    return [
        e
        for e in _record_index(record).get(concept, ())
        if (kind is None or e.kind == kind) and _in_stay_window(record, e, start, end)
    ]


def _performances(record: PatientRecord, concept: str, start: datetime, end: datetime):
    return _concept_events(record, concept, start, end, kind="performance")


# --------------------------------------------------------------------------
# leaf calculations


def score_binary(record: PatientRecord, action: ActionSpec, start: datetime, end: datetime) -> ActionScore:
    """1 if the action was performed at least once, else 0; repeats carry no penalty."""
    wanted_kind = getattr(action.constraint, "event_kind", "performance")
    performed = _concept_events(record, action.concept, start, end, kind=wanted_kind)
    value = 1.0 if performed else 0.0
    evidence = tuple(
        {"episode": f"performance at {e.timestamp.isoformat()}", "contribution": 1.0} for e in performed[:1]
    )
    return ActionScore(action.id, value, numerator=float(len(performed)), denominator=1.0, evidence=evidence)


def score_time_constraint(
    record: PatientRecord, action: ActionSpec, start: datetime, end: datetime
) -> ActionScore:
    """Trapezoid membership of the delay from the reference instant to the first performance."""
    constraint: Time = action.constraint
    if constraint.reference_event == "stage-entry":
        ref = max(record.admission, start)
        trigger = "stage-entry"
    else:
        refs = _concept_events(record, constraint.reference_event, start, end)
        if not refs:
            return ActionScore(
                action.id, None, reason=f"MissingReference: no {constraint.reference_event} event in window"
            )
        ref = refs[0].timestamp
        trigger = constraint.reference_event
    later = [e for e in _performances(record, action.concept, start, end) if e.timestamp >= ref]
    if not later:
        return ActionScore(
            action.id,
            0.0,
            denominator=1.0,
            evidence=({"episode": f"no performance after {trigger}", "contribution": 0.0},),
        )
    elapsed = _hours(later[0].timestamp - ref)
    value = constraint.trapezoid.membership(elapsed)
    evidence = ({"episode": f"performed {elapsed:g}h after {trigger}", "contribution": value},)
    return ActionScore(action.id, value, numerator=elapsed, denominator=1.0, evidence=evidence)


def score_cyclical_proportional(
    record: PatientRecord, action: ActionSpec, start: datetime, end: datetime
) -> ActionScore:
    """performed / (expected_cardinality x observed-fraction-of-window), clamped to [0, 1]."""
    constraint: Cyclical = action.constraint
    observed = record.observed_overlap(start, end)
    if observed <= 0.0:
        return ActionScore(action.id, None, reason="ZeroObservation: window does not overlap the stay")
    time_proportion = observed / constraint.window_hours
    expected = constraint.expected_cardinality * time_proportion
    performed = len(_performances(record, action.concept, start, end))
    value = _clamp(performed / expected)
    evidence = (
        {
            "episode": f"{performed} performed vs {expected:g} expected over {observed:g}h observed",
            "contribution": value,
        },
    )
    return ActionScore(action.id, value, numerator=float(performed), denominator=expected, evidence=evidence)


def score_cyclical_fuzzy(
    record: PatientRecord, action: ActionSpec, start: datetime, end: datetime
) -> ActionScore:
    """Mean trapezoid membership of the gaps between consecutive performances."""
    constraint: Cyclical = action.constraint
    instances = _performances(record, action.concept, start, end)
    if len(instances) < 2:
        return ActionScore(action.id, None, reason="fewer than two instances; no gap to score")
    gaps = [
        _hours(b.timestamp - a.timestamp) for a, b in zip(instances, instances[1:])
    ]
    memberships = [constraint.trapezoid.membership(g) for g in gaps]
    value = sum(memberships) / len(memberships)
    evidence = tuple(
        {"episode": f"gap of {g:g}h", "contribution": m} for g, m in zip(gaps, memberships)
    )
    return ActionScore(
        action.id, value, numerator=sum(memberships), denominator=float(len(gaps)), evidence=evidence
    )


# --------------------------------------------------------------------------
# condition episodes


def condition_episodes(
    record: PatientRecord, condition: ConditionExpr, start: datetime, end: datetime
) -> list[Episode]:
    """Maximal runs of observations satisfying the condition, half-open.

    The condition is re-evaluated at every observation of a referenced
    concept, carrying each concept's latest value forward; an episode
    opens when the condition becomes true and closes at the first
    observation making it false, or at the window end.
    """
    concepts = referenced_concepts(condition)
    observations: list[Event] = []
    for concept in concepts:
        observations.extend(_concept_events(record, concept, start, end, kind="observation"))
    observations.sort(key=Event.sort_key)
    state: dict[str, object] = {}
    episodes: list[Episode] = []
    open_start: Optional[datetime] = None
    trigger = ""
    for e in observations:
        state[e.concept] = e.value
        holds = condition.holds(state)
        if holds and open_start is None:
            open_start = e.timestamp
            trigger = f"{e.concept}={e.value!r}"
        elif not holds and open_start is not None:
            episodes.append(Episode(open_start, e.timestamp, trigger))
            open_start = None
    if open_start is not None:
        episodes.append(Episode(open_start, end, trigger))
    return episodes


def condition_ever_holds(
    record: PatientRecord, condition: ConditionExpr, start: datetime, end: datetime
) -> bool:
    return bool(condition_episodes(record, condition, start, end))


def _score_over_episodes(
    record: PatientRecord,
    action: ActionSpec,
    episodes: list[Episode],
    start: datetime,
    end: datetime,
) -> ActionScore:
    if not episodes:
        return ActionScore(action.id, None, reason="entry condition never met in window")
    performances = _performances(record, action.concept, start, end)
    covered = 0
    evidence = []
    for ep in episodes:
        hit = any(ep.start <= p.timestamp < ep.end for p in performances)
        covered += hit
        evidence.append(
            {
                "episode": f"{ep.trigger} from {ep.start.isoformat()} to {ep.end.isoformat()}",
                "contribution": 1.0 if hit else 0.0,
            }
        )
    value = covered / len(episodes)
    return ActionScore(
        action.id, value, numerator=float(covered), denominator=float(len(episodes)), evidence=tuple(evidence)
    )


def score_entry_condition(
    record: PatientRecord, action: ActionSpec, start: datetime, end: datetime
) -> ActionScore:
    """Episodes satisfying the condition that contain at least one performance, over all episodes."""
    constraint: EntryCondition = action.constraint
    episodes = condition_episodes(record, constraint.condition, start, end)
    return _score_over_episodes(record, action, episodes, start, end)


def score_multiple(
    record: PatientRecord, action: ActionSpec, start: datetime, end: datetime
) -> ActionScore:
    """Like score_entry_condition with the disjunction of all conditions."""
    constraint: Multiple = action.constraint
    episodes = condition_episodes(record, Or(tuple(constraint.conditions)), start, end)
    return _score_over_episodes(record, action, episodes, start, end)


def score_order(record: PatientRecord, action: ActionSpec, start: datetime, end: datetime) -> ActionScore:
    """Fraction of performances preceded by an unconsumed must_follow event.

    Pairing is greedy: each performance takes the latest still-unconsumed
    must_follow event at or before it (within max_lag if set).
    """
    constraint: Order = action.constraint
    performances = _performances(record, action.concept, start, end)
    if not performances:
        return ActionScore(action.id, None, reason="action never performed in window")
    precursors = _concept_events(
        record, constraint.must_follow, start, end, kind=constraint.must_follow_kind
    )
    consumed = [False] * len(precursors)
    paired = 0
    evidence = []
    for p in performances:
        chosen = None
        for i in range(len(precursors) - 1, -1, -1):
            f = precursors[i]
            if consumed[i] or f.timestamp > p.timestamp:
                continue
            if (
                constraint.max_lag_hours is not None
                and _hours(p.timestamp - f.timestamp) > constraint.max_lag_hours
            ):
                continue
            chosen = i
            break
        if chosen is not None:
            consumed[chosen] = True
            paired += 1
            evidence.append(
                {"episode": f"performance at {p.timestamp.isoformat()} paired", "contribution": 1.0}
            )
        else:
            evidence.append(
                {"episode": f"performance at {p.timestamp.isoformat()} unpaired", "contribution": 0.0}
            )
    if precursors:
        coverage = sum(consumed) / len(precursors)
        evidence.append(
            {"episode": f"instruction coverage {sum(consumed)}/{len(precursors)}", "contribution": coverage}
        )
    value = paired / len(performances)
    return ActionScore(
        action.id,
        value,
        numerator=float(paired),
        denominator=float(len(performances)),
        evidence=tuple(evidence),
    )


# --------------------------------------------------------------------------
# combination and dispatch


def score_combination(
    record: PatientRecord, action: ActionSpec, start: datetime, end: datetime
) -> ActionScore:
    """Weighted sum of part scores, weights renormalized over the defined parts."""
    constraint: Combination = action.constraint
    parts = []
    for i, part in enumerate(constraint.parts):
        sub_action = ActionSpec(
            id=f"{action.id}#{part.component or i}",
            name=part.component or f"part {i}",
            concept=part.concept or action.concept,
            weight=part.weight,
            constraint=part.constraint,
        )
        sub = score_action(record, sub_action, start, end)
        parts.append((part, sub))
    defined = [(part, sub) for part, sub in parts if sub.defined]
    components = tuple(
        (part.component or f"part{i}", part.weight, sub.value) for i, (part, sub) in enumerate(parts)
    )
    evidence = tuple(
        {"episode": f"{part.component or 'part'} -> {sub.value if sub.defined else 'undefined'}",
         "contribution": sub.value if sub.defined else 0.0}
        for part, sub in parts
    )
    if not defined:
        return ActionScore(action.id, None, components=components, evidence=evidence,
                           reason="all combination parts undefined")
    total_w = sum(part.weight for part, _ in defined)
    value = sum(part.weight * sub.value for part, sub in defined) / total_w
    return ActionScore(
        action.id,
        value,
        numerator=sum(part.weight * sub.value for part, sub in defined),
        denominator=total_w,
        components=components,
        evidence=evidence,
    )


_DISPATCH = {
    Binary: score_binary,
    Cyclical: None,  # resolved below on calculation
    Time: score_time_constraint,
    EntryCondition: score_entry_condition,
    Order: score_order,
    Multiple: score_multiple,
    Combination: score_combination,
}


def score_action(record: PatientRecord, action: ActionSpec, start: datetime, end: datetime) -> ActionScore:
    """Dispatch to the calculation matching the action's constraint category."""
    constraint = action.constraint
    if isinstance(constraint, Cyclical):
        if constraint.calculation == "fuzzy":
            return score_cyclical_fuzzy(record, action, start, end)
        return score_cyclical_proportional(record, action, start, end)
    fn = _DISPATCH.get(type(constraint))
    if fn is None:
        raise TypeError(f"no scoring rule for constraint {type(constraint).__name__}")
    return fn(record, action, start, end)
