"""Shared fixtures and timeline-building helpers."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

from guideline_qa.events import Event, PatientRecord
from guideline_qa.protocol import ActionSpec, parse_protocol

T0 = datetime(2017, 1, 1, 0, 0, tzinfo=timezone.utc)

PROTOCOL_PATH = Path(__file__).resolve().parent.parent / "protocols" / "pressure_ulcer.json"


def at(hours: float) -> datetime:
    return T0 + timedelta(hours=hours)


def ev(concept: str, kind: str, hours: float, value=None, pid: str = "p1") -> Event:
    return Event(pid, concept, kind, at(hours), value)


def rec(events, admission_h: float = 0.0, discharge_h: float = 7 * 24.0,
        ward: str = "ward-a", pid: str = "p1") -> PatientRecord:
    return PatientRecord(
        patient_id=pid,
        ward=ward,
        admission=at(admission_h),
        discharge=at(discharge_h),
        events=tuple(sorted(events, key=Event.sort_key)),
    )


def action(constraint, concept: str = "ACT", action_id: str = "a1",
           weight: float = 1.0) -> ActionSpec:
    return ActionSpec(id=action_id, name=action_id, concept=concept,
                      weight=weight, constraint=constraint)


@pytest.fixture(scope="session")
def shipped_protocol():
    return parse_protocol(PROTOCOL_PATH)
