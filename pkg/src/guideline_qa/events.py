"""Immutable per-patient event timelines and their ingestion.

Time windows are half-open, [from, to), throughout: adjacent windows
partition a stay without double counting.  Events at the same instant
sort instruction < performance < observation, so an instruction and its
performance stamped at the same minute count as correctly ordered.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional, Union

from .errors import EmptyWindow, ParseError, TimestampError, UnknownPatient

EVENT_KINDS = ("instruction", "performance", "observation")
_KIND_RANK = {k: i for i, k in enumerate(EVENT_KINDS)}

CSV_HEADER = ["patient_id", "ward", "concept", "kind", "timestamp", "value"]


def parse_instant(text: str, row: Optional[int] = None) -> datetime:
    """ISO-8601 to a timezone-aware UTC datetime; naive input is taken as UTC."""
    try:
        ts = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except (ValueError, AttributeError):
        raise TimestampError(f"invalid ISO-8601 timestamp {text!r}", row) from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_instant(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


@dataclass(frozen=True, order=False)
class Event:
    patient_id: str
    concept: str
    kind: str
    timestamp: datetime
    value: Optional[Union[float, str]] = None

    def sort_key(self):
        return (self.timestamp, _KIND_RANK[self.kind], self.concept)


@dataclass(frozen=True)
class PatientRecord:
    patient_id: str
    ward: str
    admission: datetime
    discharge: Optional[datetime]
    events: tuple

    def __post_init__(self):
        if self.discharge is not None and self.admission > self.discharge:
            raise ParseError(f"patient {self.patient_id}: admission after discharge")

    def events_of(self, concept: str, kind: Optional[str] = None):
        return [
            e for e in self.events if e.concept == concept and (kind is None or e.kind == kind)
        ]

    def observed_overlap(self, start: datetime, end: datetime) -> float:
        """Overlap of [start, end) with the stay, in hours."""
        stay_end = self.discharge if self.discharge is not None else end
        lo = max(start, self.admission)
        hi = min(end, stay_end)
        if hi <= lo:
            return 0.0
        return (hi - lo).total_seconds() / 3600.0


@dataclass(frozen=True)
class Cohort:
    patients: tuple
    provenance: str
    dropped_duplicates: int = 0
    flagged_out_of_stay: int = 0

    def __post_init__(self):
        ids = [p.patient_id for p in self.patients]
        if len(ids) != len(set(ids)):
            raise ParseError("duplicate patient_ids in cohort")

    def patient(self, patient_id: str) -> PatientRecord:
        for p in self.patients:
            if p.patient_id == patient_id:
                return p
        raise KeyError(patient_id)


def _build_record(
    patient_id: str,
    ward: str,
    raw_events: list[Event],
    admission: Optional[datetime],
    discharge: Optional[datetime],
    strict: bool,
) -> tuple[PatientRecord, int]:
    events = sorted(raw_events, key=Event.sort_key)
    deduped: list[Event] = []
    seen: set = set()
    dropped = 0
    for e in events:
        key = (e.patient_id, e.concept, e.kind, e.timestamp)
        if key in seen:
            dropped += 1
            continue
        seen.add(key)
        deduped.append(e)
    if admission is None:
        marker = [e for e in deduped if e.concept == "ADMISSION"]
        if marker:
            admission = marker[0].timestamp
        elif strict:
            raise UnknownPatient(f"patient {patient_id} has no admission record")
        elif deduped:
            admission = deduped[0].timestamp
        else:
            raise ParseError(f"patient {patient_id} has no events and no admission")
    if discharge is None:
        marker = [e for e in deduped if e.concept == "DISCHARGE"]
        if marker:
            discharge = marker[-1].timestamp
    return PatientRecord(patient_id, ward, admission, discharge, tuple(deduped)), dropped


def load_events(
    source: Union[str, Path], format: Optional[str] = None, strict: bool = False
) -> Cohort:
    """Load an event document into a Cohort.

    ``format`` defaults from the file extension ('csv' or 'json').
    """
    path = Path(source)
    if format is None:
        format = path.suffix.lstrip(".").lower() or "csv"
    text = path.read_text(encoding="utf-8")
    if format == "csv":
        return _load_csv(text, str(path), strict)
    if format == "json":
        return _load_json(text, str(path), strict)
    raise ParseError(f"unknown event format {format!r}")


def _parse_value(raw) -> Optional[Union[float, str]]:
    if raw is None or raw == "":
        return None
    if isinstance(raw, (int, float)):
        return float(raw)
    try:
        return float(raw)
    except ValueError:
        return raw


def _load_csv(text: str, provenance: str, strict: bool) -> Cohort:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != CSV_HEADER:
        raise ParseError(f"expected CSV header {','.join(CSV_HEADER)}")
    by_patient: dict[str, dict] = {}
    for i, row in enumerate(reader, start=2):
        try:
            kind = row["kind"]
            if kind not in EVENT_KINDS:
                raise ParseError(f"unknown event kind {kind!r}", i)
            ev = Event(
                patient_id=row["patient_id"],
                concept=row["concept"],
                kind=kind,
                timestamp=parse_instant(row["timestamp"], i),
                value=_parse_value(row["value"]),
            )
        except KeyError as exc:
            raise ParseError(f"missing column {exc}", i) from None
        slot = by_patient.setdefault(ev.patient_id, {"ward": row["ward"], "events": []})
        slot["events"].append(ev)
    patients = []
    dropped = 0
    for pid, slot in by_patient.items():
        rec, d = _build_record(pid, slot["ward"], slot["events"], None, None, strict)
        patients.append(rec)
        dropped += d
    patients.sort(key=lambda p: p.patient_id)
    return Cohort(tuple(patients), provenance, dropped_duplicates=dropped)


def _load_json(text: str, provenance: str, strict: bool) -> Cohort:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, list):
        raise ParseError("JSON event document must be an array of patient objects")
    patients = []
    dropped = 0
    for i, p in enumerate(doc):
        try:
            pid = p["patient_id"]
        except (KeyError, TypeError):
            raise ParseError(f"patient object {i} missing patient_id") from None
        admission = parse_instant(p["admission"]) if p.get("admission") else None
        discharge = parse_instant(p["discharge"]) if p.get("discharge") else None
        raw = []
        for j, e in enumerate(p.get("events", [])):
            kind = e.get("kind")
            if kind not in EVENT_KINDS:
                raise ParseError(f"patient {pid} event {j}: unknown kind {kind!r}")
            raw.append(
                Event(pid, e["concept"], kind, parse_instant(e["timestamp"]), _parse_value(e.get("value")))
            )
        rec, d = _build_record(pid, p.get("ward", ""), raw, admission, discharge, strict)
        patients.append(rec)
        dropped += d
    return Cohort(tuple(patients), provenance, dropped_duplicates=dropped)


def slice_record(record: PatientRecord, start: datetime, end: datetime) -> PatientRecord:
    """Restrict a record to events with start <= timestamp < end.

    Admission/discharge are clipped to the window so partial-interval
    proportional scoring sees the reduced observed duration.
    """
    if start == end:
        raise EmptyWindow(f"empty window at {format_instant(start)}")
    if start > end:
        raise EmptyWindow("window start after end")
    events = tuple(e for e in record.events if start <= e.timestamp < end)
    admission = max(record.admission, start)
    discharge = record.discharge
    if discharge is None or discharge > end:
        discharge = end
    if admission > discharge:
        admission = discharge  # window entirely outside the stay: zero observed duration
    return replace(record, events=events, admission=admission, discharge=discharge)


# --------------------------------------------------------------------------
# serialization


def save_events_csv(cohort: Cohort, path: Union[str, Path]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for p in cohort.patients:
            for e in p.events:
                val = "" if e.value is None else e.value
                writer.writerow([e.patient_id, p.ward, e.concept, e.kind, format_instant(e.timestamp), val])


def cohort_to_json(cohort: Cohort) -> list[dict]:
    out = []
    for p in cohort.patients:
        out.append(
            {
                "patient_id": p.patient_id,
                "ward": p.ward,
                "admission": format_instant(p.admission),
                "discharge": format_instant(p.discharge) if p.discharge else None,
                "events": [
                    {
                        "concept": e.concept,
                        "kind": e.kind,
                        "timestamp": format_instant(e.timestamp),
                        **({"value": e.value} if e.value is not None else {}),
                    }
                    for e in p.events
                ],
            }
        )
    return out
