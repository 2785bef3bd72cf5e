"""Command line interface: qa score | serve | generate | compare."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .aggregation import Interval, node_to_json, score_protocol
from .errors import GuidelineQAError
from .events import load_events, parse_instant, save_events_csv
from .protocol import parse_protocol
from .service import Snapshot, create_app, load_snapshot, score_tree_json
from .stats import (
    MetricVectorPair,
    compare_scores,
    load_metric_pairs,
    render_report_csv,
    render_report_json,
)
from .synth import generate_cohort


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qa", description="Guideline compliance scoring")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score an event log against a protocol")
    p.add_argument("--protocol", required=True)
    p.add_argument("--events", required=True)
    p.add_argument("--from", dest="from_", default=None)
    p.add_argument("--to", dest="to", default=None)
    p.add_argument("--ward", action="append", default=[])
    p.add_argument("--patient", action="append", default=[])
    p.add_argument("--stage", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None)

    p = sub.add_parser("serve", help="serve the scores API")
    p.add_argument("--protocol", required=True)
    p.add_argument("--events", required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")

    p = sub.add_parser("generate", help="generate a synthetic cohort")
    p.add_argument("--protocol", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--profile", default=None, help="JSON action-id -> target score map")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("compare", help="compare manual vs automated scores")
    p.add_argument("--manual", required=True)
    p.add_argument("--automated", default=None)
    p.add_argument("--auto", action="store_true", help="score the automated side from events")
    p.add_argument("--events", default=None)
    p.add_argument("--protocol", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--out", default=None)
    return parser


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _score_csv_rows(snapshot: Snapshot, from_, to) -> list[dict]:
    """One row per (patient, action) pair."""
    from .service import _parse_window  # shared filter semantics

    window = _parse_window(snapshot, from_, to)
    rows = []
    for record in snapshot.cohort.patients:
        tree = score_protocol(record, snapshot.protocol, window)
        for stage in tree.children:
            for action in stage.children:
                rows.append(
                    {
                        "patient_id": record.patient_id,
                        "stage": stage.label,
                        "action": action.label,
                        "value": "" if action.value is None else f"{action.value:.6f}",
                    }
                )
    return rows


def cmd_score(args) -> int:
    snapshot = load_snapshot(args.protocol, args.events)
    if args.format == "json":
        tree = score_tree_json(
            snapshot,
            from_=args.from_,
            to=args.to,
            wards=args.ward,
            patient_ids=args.patient,
            stage_id=args.stage,
        )
        _write(json.dumps(tree, indent=2), args.out)
    else:
        rows = _score_csv_rows(snapshot, args.from_, args.to)
        import io

        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["patient_id", "stage", "action", "value"])
        writer.writeheader()
        writer.writerows(rows)
        _write(buf.getvalue(), args.out)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    snapshot = load_snapshot(args.protocol, args.events)
    app = create_app(snapshot)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_generate(args) -> int:
    if args.n < 1:
        print("error: --n must be >= 1", file=sys.stderr)
        return 2
    protocol = parse_protocol(args.protocol)
    profile = {}
    if args.profile:
        profile = json.loads(Path(args.profile).read_text(encoding="utf-8"))
    cohort = generate_cohort(protocol, args.n, profile, seed=args.seed)
    save_events_csv(cohort, args.out)
    print(f"wrote {sum(len(p.events) for p in cohort.patients)} events "
          f"for {len(cohort.patients)} patients to {args.out}", file=sys.stderr)
    return 0


def _load_score_csv(path: str) -> dict[tuple[str, str], float]:
    """metric,patient_id,score triples keyed by (metric, patient_id)."""
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out[(row["metric"], row["patient_id"])] = float(row["score"])
    return out


def _pairs_from_joined(manual: dict, automated: dict) -> tuple[list[MetricVectorPair], list[dict]]:
    pairs = []
    warnings = []
    metrics_m = {m for m, _ in manual}
    metrics_a = {m for m, _ in automated}
    for metric in sorted(metrics_m | metrics_a):
        if metric not in metrics_a or metric not in metrics_m:
            warnings.append({"metric": metric, "n": 0, "flag": "warning: metric missing on one side"})
            continue
        keys = sorted(k for k in manual if k[0] == metric and k in automated)
        if len(keys) < 2:
            warnings.append({"metric": metric, "n": len(keys), "flag": "warning: fewer than 2 paired scores"})
            continue
        pairs.append(
            MetricVectorPair(metric, tuple(manual[k] for k in keys), tuple(automated[k] for k in keys))
        )
    return pairs, warnings


def _automated_scores(protocol_path: str, events_path: str) -> dict[tuple[str, str], float]:
    snapshot = load_snapshot(protocol_path, events_path)
    window = snapshot.default_window()
    out = {}
    for record in snapshot.cohort.patients:
        tree = score_protocol(record, snapshot.protocol, window)
        for stage in tree.children:
            for action in stage.children:
                if action.value is not None:
                    out[(action.label, record.patient_id)] = action.value
    return out


def cmd_compare(args) -> int:
    with open(args.manual, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), [])
    if {"manual_score", "automated_score"} <= set(header):
        pairs = load_metric_pairs(args.manual)
        warnings = []
    else:
        manual = _load_score_csv(args.manual)
        if args.auto:
            if not (args.events and args.protocol):
                print("error: --auto requires --events and --protocol", file=sys.stderr)
                return 2
            automated = _automated_scores(args.protocol, args.events)
        elif args.automated:
            automated = _load_score_csv(args.automated)
        else:
            print("error: provide --automated FILE or --auto", file=sys.stderr)
            return 2
        pairs, warnings = _pairs_from_joined(manual, automated)
    report = compare_scores(pairs) + warnings
    text = render_report_csv(report) if args.format == "csv" else render_report_json(report)
    _write(text, args.out)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "score": cmd_score,
        "serve": cmd_serve,
        "generate": cmd_generate,
        "compare": cmd_compare,
    }
    try:
        return handlers[args.command](args)
    except GuidelineQAError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"FileNotFoundError: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
