"""Deterministic synthetic cohorts with controllable compliance.

Given a protocol and a per-action target score, emits event timelines
that score close to the targets when evaluated by the engine: exact at
the fully-compliant corner, statistically close for fractional targets.
Deliberate violations (an action performed before its instruction, a
test performed too late) fall out of the fractional targets naturally.
"""

from __future__ import annotations

import math
import random
from datetime import datetime, timedelta, timezone
from typing import Mapping, Optional

from .conditions import falsifying_assignment, satisfying_assignment, Or
from .errors import ProfileError
from .events import Cohort, Event, PatientRecord
from .protocol import (
    ActionSpec,
    Binary,
    Combination,
    Cyclical,
    EntryCondition,
    Multiple,
    Order,
    Protocol,
    Time,
)
from .trapezoid import Trapezoid

_BASE = datetime(2017, 1, 1, 8, 0, tzinfo=timezone.utc)
_WARDS = ("ward-a", "ward-b", "ward-c")


def _concept_kind(protocol: Protocol, code: str) -> str:
    """Event kind to emit for a concept; 'action' concepts emit performances."""
    for c in protocol.concepts:
        if c.code == code:
            return "performance" if c.kind == "action" else c.kind
    return "observation"


def _plateau_duration(trap: Trapezoid) -> float:
    """A duration with membership 1, preferring the middle of the plateau."""
    if math.isinf(trap.c):
        return trap.b + 24.0 if trap.b > 0 else 24.0
    if trap.b == trap.c:
        return trap.b
    return (trap.b + trap.c) / 2.0


def _duration_for_target(trap: Trapezoid, target: float) -> Optional[float]:
    """A duration whose membership equals the target; None means 'omit the event'."""
    if target >= 1.0:
        return _plateau_duration(trap)
    if target <= 0.0:
        return trap.d + 1.0 if not math.isinf(trap.d) else None
    if not math.isinf(trap.d) and trap.d > trap.c:
        return trap.d - target * (trap.d - trap.c)
    if not math.isinf(trap.a) and trap.b > trap.a:
        return trap.a + target * (trap.b - trap.a)
    return _plateau_duration(trap)  # no usable slope: best effort


class _PatientBuilder:
    def __init__(self, protocol: Protocol, patient_id: str, ward: str, admission: datetime,
                 discharge: datetime, rng: random.Random):
        self.protocol = protocol
        self.pid = patient_id
        self.ward = ward
        self.admission = admission
        self.discharge = discharge
        self.rng = rng
        self.events: list[Event] = []

    def emit(self, concept: str, kind: str, at: datetime, value=None) -> None:
        if at >= self.discharge:
            at = self.discharge - timedelta(minutes=1)
        if at < self.admission:
            at = self.admission
        self.events.append(Event(self.pid, concept, kind, at, value))

    def emit_assignment(self, assignment: Mapping[str, object], at: datetime) -> None:
        for concept, value in sorted(assignment.items()):
            self.emit(concept, "observation", at, value)

    # -- constraint generators ------------------------------------------

    def gen_binary(self, action: ActionSpec, constraint: Binary, target: float) -> None:
        do = target >= 1.0 or (target > 0.0 and self.rng.random() < target)
        if do:
            self.emit(action.concept, constraint.event_kind, self.admission + timedelta(hours=6))

    def gen_cyclical(self, action: ActionSpec, constraint: Cyclical, target: float) -> list[datetime]:
        stay_hours = (self.discharge - self.admission).total_seconds() / 3600.0
        if constraint.calculation == "fuzzy":
            gap = _duration_for_target(constraint.trapezoid, target)
            if gap is None or gap <= 0:
                gap = constraint.window_hours / constraint.expected_cardinality
            times = []
            t = self.admission + timedelta(hours=1)
            while t < self.discharge:
                times.append(t)
                t = t + timedelta(hours=gap)
        else:
            interval = constraint.window_hours / constraint.expected_cardinality
            full = []
            t = self.admission
            while t < self.discharge:
                full.append(t)
                t = t + timedelta(hours=interval)
            keep = len(full) if target >= 1.0 else max(0, round(target * len(full)))
            if keep >= len(full):
                times = full
            elif keep == 0:
                times = []
            else:
                step = len(full) / keep
                times = [full[min(len(full) - 1, int(i * step))] for i in range(keep)]
        for t in times:
            self.emit(action.concept, "performance", t)
        return times

    def gen_time(self, action: ActionSpec, constraint: Time, target: float) -> None:
        if constraint.reference_event == "stage-entry":
            ref = self.admission
        else:
            ref = self.admission + timedelta(hours=1)
            self.emit(
                constraint.reference_event,
                _concept_kind(self.protocol, constraint.reference_event),
                ref,
            )
        delay = _duration_for_target(constraint.trapezoid, target)
        if delay is not None:
            self.emit(action.concept, "performance", ref + timedelta(hours=delay))

    def gen_condition_episodes(self, action: ActionSpec, condition, target: float) -> None:
        episodes = 4
        hit = episodes if target >= 1.0 else round(target * episodes)
        stay = self.discharge - self.admission
        for k in range(episodes):
            t0 = self.admission + stay * (k + 1) / (episodes + 2)
            self.emit_assignment(satisfying_assignment(condition), t0)
            if k < hit:
                self.emit(action.concept, "performance", t0 + timedelta(hours=2))
            self.emit_assignment(falsifying_assignment(condition), t0 + timedelta(hours=24))

    def gen_order(self, action: ActionSpec, constraint: Order, target: float,
                  schedule: Optional[list[datetime]] = None) -> None:
        if schedule is None:
            stay = self.discharge - self.admission
            schedule = [self.admission + stay * (k + 1) / 6 for k in range(4)]
            for t in schedule:
                self.emit(action.concept, "performance", t)
        paired = len(schedule) if target >= 1.0 else round(target * len(schedule))
        lead = timedelta(hours=0.5)
        if constraint.max_lag_hours is not None:
            lead = min(lead, timedelta(hours=constraint.max_lag_hours / 2))
        kind = constraint.must_follow_kind or _concept_kind(self.protocol, constraint.must_follow)
        for t in schedule[:paired]:
            self.emit(constraint.must_follow, kind, t - lead)

    def gen_action(self, action: ActionSpec, constraint, target: float,
                   schedule: Optional[list[datetime]] = None) -> Optional[list[datetime]]:
        if isinstance(constraint, Binary):
            self.gen_binary(action, constraint, target)
            return schedule
        if isinstance(constraint, Cyclical):
            return self.gen_cyclical(action, constraint, target)
        if isinstance(constraint, Time):
            self.gen_time(action, constraint, target)
            return schedule
        if isinstance(constraint, EntryCondition):
            self.gen_condition_episodes(action, constraint.condition, target)
            return schedule
        if isinstance(constraint, Multiple):
            self.gen_condition_episodes(action, Or(tuple(constraint.conditions)), target)
            return schedule
        if isinstance(constraint, Order):
            self.gen_order(action, constraint, target, schedule)
            return schedule
        if isinstance(constraint, Combination):
            # schedule-defining parts first so order parts can pair against them
            parts = sorted(
                constraint.parts,
                key=lambda p: 0 if isinstance(p.constraint, (Cyclical, Time)) else
                1 if not isinstance(p.constraint, Order) else 2,
            )
            for part in parts:
                sub = action if part.concept is None else ActionSpec(
                    action.id, action.name, part.concept, action.weight, part.constraint
                )
                result = self.gen_action(sub, part.constraint, target, schedule)
                if part.concept is None:
                    schedule = result
            return schedule
        raise TypeError(f"no generator for constraint {type(constraint).__name__}")


def generate_cohort(
    protocol: Protocol,
    n_patients: int,
    compliance_profile: Optional[Mapping[str, float]] = None,
    seed: int = 0,
) -> Cohort:
    """Pure function of (protocol, n_patients, profile, seed)."""
    if n_patients < 1:
        raise ProfileError("n_patients must be >= 1")
    profile = dict(compliance_profile or {})
    default = float(profile.pop("default", 1.0))
    action_ids = {a.id for _, a in protocol.actions()}
    unknown = set(profile) - action_ids
    if unknown:
        raise ProfileError(f"profile references unknown actions: {sorted(unknown)}")
    for aid, target in profile.items():
        if not 0.0 <= float(target) <= 1.0:
            raise ProfileError(f"target for {aid} must be in [0, 1]")

    def action_target(action: ActionSpec, index: int) -> float:
        target = float(profile.get(action.id, default))
        if isinstance(action.constraint, Combination) and 0.0 < target < 1.0:
            # Combination parts share one event stream, so partial targets
            # cannot be hit within a single patient (an instruction emitted
            # for the ordering part also satisfies the command part).
            # Instead, stratify across patients: make a deterministic quota
            # of them fully compliant so the cohort mean equals the target
            # to within 1/n.
            step = math.floor(target * (index + 1)) - math.floor(target * index)
            return 1.0 if step >= 1 else 0.0
        return target

    rng = random.Random(seed)
    patients = []
    for i in range(n_patients):
        pid = f"p{i + 1:04d}"
        ward = _WARDS[rng.randrange(len(_WARDS))]
        admission = _BASE + timedelta(days=rng.randrange(0, 30), hours=rng.randrange(0, 12))
        stay_days = rng.randrange(45, 91)
        discharge = admission + timedelta(days=stay_days)
        b = _PatientBuilder(protocol, pid, ward, admission, discharge, rng)
        b.emit("ADMISSION", "observation", admission)
        b.emit("DISCHARGE", "observation", discharge - timedelta(minutes=1))
        for stage in protocol.stages:
            if stage.entry_condition is not None:
                b.emit_assignment(
                    satisfying_assignment(stage.entry_condition),
                    admission + timedelta(minutes=5),
                )
            for action in stage.actions:
                b.gen_action(action, action.constraint, action_target(action, i))
        events = sorted(b.events, key=Event.sort_key)
        deduped = []
        seen = set()
        for e in events:
            key = (e.concept, e.kind, e.timestamp)
            if key in seen:
                continue
            seen.add(key)
            deduped.append(e)
        patients.append(PatientRecord(pid, ward, admission, discharge, tuple(deduped)))
    return Cohort(tuple(patients), provenance=f"generate_cohort(seed={seed})")
