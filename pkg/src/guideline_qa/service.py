"""HTTP API over an immutable in-memory snapshot of protocol + cohort.

The snapshot is built at startup and swapped atomically on POST
/api/reload; requests never observe a half-loaded state.  Score JSON is
produced by the same code path as the CLI, byte for byte.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .aggregation import Interval, compare_trees, node_to_json, score_cohort, score_protocol
from .errors import GuidelineQAError, StructureMismatch
from .events import Cohort, load_events, parse_instant
from .protocol import Protocol, parse_protocol, protocol_to_json


@dataclass(frozen=True)
class Snapshot:
    protocol: Protocol
    cohort: Cohort
    protocol_path: str
    events_path: str

    def default_window(self) -> Interval:
        start = min(p.admission for p in self.cohort.patients)
        end = max(
            (p.discharge or p.events[-1].timestamp) for p in self.cohort.patients
        ) + timedelta(hours=1)
        return Interval(start, end)


def load_snapshot(protocol_path: str, events_path: str) -> Snapshot:
    return Snapshot(
        protocol=parse_protocol(protocol_path),
        cohort=load_events(events_path),
        protocol_path=protocol_path,
        events_path=events_path,
    )


class _BadFilter(GuidelineQAError):
    pass


class _NotFound(GuidelineQAError):
    pass


def _parse_window(snapshot: Snapshot, from_: Optional[str], to: Optional[str]) -> Interval:
    default = snapshot.default_window()
    try:
        start = parse_instant(from_) if from_ else default.start
        end = parse_instant(to) if to else default.end
    except GuidelineQAError as exc:
        raise _BadFilter(str(exc)) from None
    if start >= end:
        raise _BadFilter("'from' must be strictly before 'to'")
    return Interval(start, end)


def _filter_records(snapshot: Snapshot, wards: list[str], patient_ids: list[str]):
    records = list(snapshot.cohort.patients)
    if wards:
        known = {p.ward for p in records}
        for w in wards:
            if w not in known:
                raise _NotFound(f"unknown ward {w!r}")
        records = [p for p in records if p.ward in wards]
    if patient_ids:
        known = {p.patient_id for p in records}
        for pid in patient_ids:
            if pid not in known:
                raise _NotFound(f"unknown patient {pid!r}")
        records = [p for p in records if p.patient_id in patient_ids]
    return records


def score_tree_json(
    snapshot: Snapshot,
    from_: Optional[str] = None,
    to: Optional[str] = None,
    wards: Optional[list[str]] = None,
    patient_ids: Optional[list[str]] = None,
    stage_id: Optional[str] = None,
) -> dict:
    """Shared scoring path for the CLI and the /api/scores endpoint."""
    window = _parse_window(snapshot, from_, to)
    if stage_id is not None:
        try:
            snapshot.protocol.stage(stage_id)
        except KeyError:
            raise _NotFound(f"unknown stage {stage_id!r}") from None
    records = _filter_records(snapshot, wards or [], patient_ids or [])
    tree = score_cohort(records, snapshot.protocol, window, stage_id=stage_id)
    return node_to_json(tree)


def _json_response(payload, status_code: int = 200) -> Response:
    return Response(
        content=json.dumps(payload, indent=2), media_type="application/json", status_code=status_code
    )


def create_app(snapshot: Snapshot) -> FastAPI:
    app = FastAPI(title="guideline-qa")
    state = {"snapshot": snapshot}
    lock = threading.Lock()

    def snap() -> Snapshot:
        return state["snapshot"]

    @app.exception_handler(_BadFilter)
    async def bad_filter(request: Request, exc: _BadFilter):
        return JSONResponse(
            status_code=400, content={"error": "bad_filter", "path": str(request.url.path), "detail": str(exc)}
        )

    @app.exception_handler(_NotFound)
    async def not_found(request: Request, exc: _NotFound):
        return JSONResponse(
            status_code=404, content={"error": "not_found", "path": str(request.url.path), "detail": str(exc)}
        )

    @app.exception_handler(GuidelineQAError)
    async def domain_error(request: Request, exc: GuidelineQAError):
        return JSONResponse(
            status_code=500, content={"error": type(exc).__name__, "path": str(request.url.path), "detail": str(exc)}
        )

    @app.get("/api/protocol")
    def get_protocol():
        return _json_response(protocol_to_json(snap().protocol))

    @app.get("/api/patients")
    def get_patients(ward: Optional[str] = None):
        s = snap()
        records = _filter_records(s, [ward] if ward else [], [])
        return _json_response(
            [
                {
                    "patient_id": p.patient_id,
                    "ward": p.ward,
                    "admission": p.admission.isoformat(),
                    "discharge": p.discharge.isoformat() if p.discharge else None,
                    "events": len(p.events),
                }
                for p in records
            ]
        )

    @app.get("/api/scores")
    def get_scores(
        request: Request,
        stage: Optional[str] = None,
    ):
        params = request.query_params
        return _json_response(
            score_tree_json(
                snap(),
                from_=params.get("from"),
                to=params.get("to"),
                wards=params.getlist("ward"),
                patient_ids=params.getlist("patient"),
                stage_id=stage,
            )
        )

    @app.get("/api/scores/{patient_id}/tree")
    def get_patient_tree(patient_id: str, request: Request):
        s = snap()
        params = request.query_params
        window = _parse_window(s, params.get("from"), params.get("to"))
        try:
            record = s.cohort.patient(patient_id)
        except KeyError:
            raise _NotFound(f"unknown patient {patient_id!r}") from None
        return _json_response(node_to_json(score_protocol(record, s.protocol, window)))

    @app.get("/api/compare")
    def get_compare(request: Request):
        s = snap()
        params = request.query_params
        for key in ("frameA_from", "frameA_to", "frameB_from", "frameB_to"):
            if key not in params:
                raise _BadFilter(f"missing query parameter {key!r}")
        window_a = _parse_window(s, params["frameA_from"], params["frameA_to"])
        window_b = _parse_window(s, params["frameB_from"], params["frameB_to"])
        records = list(s.cohort.patients)
        tree_a = score_cohort(records, s.protocol, window_a)
        tree_b = score_cohort(records, s.protocol, window_b)
        try:
            rows = compare_trees(tree_a, tree_b)
        except StructureMismatch as exc:
            raise _BadFilter(str(exc)) from None
        return _json_response(rows)

    @app.post("/api/reload")
    def reload():
        with lock:
            state["snapshot"] = load_snapshot(snap().protocol_path, snap().events_path)
        return _json_response({"reloaded": True, "patients": len(snap().cohort.patients)})

    return app
