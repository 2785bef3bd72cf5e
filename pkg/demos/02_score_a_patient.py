"""Score a single hand-built patient timeline against a small protocol.

Shows the drill-down tree: protocol -> stage -> action -> component, with
Undefined (not-applicable) nodes excluded from weighted averages.
"""

from datetime import datetime, timedelta, timezone

from guideline_qa.aggregation import Interval, node_to_json, score_protocol
from guideline_qa.events import Event, PatientRecord
from guideline_qa.protocol import parse_protocol

T0 = datetime(2017, 1, 1, tzinfo=timezone.utc)


def at(hours: float) -> datetime:
    return T0 + timedelta(hours=hours)


protocol = parse_protocol({
    "id": "demo",
    "concepts": [
        {"code": "ADMISSION", "kind": "observation"},
        {"code": "RISK_ASSESSMENT", "kind": "action"},
        {"code": "SKIN_CHECK", "kind": "action"},
    ],
    "stages": [{
        "id": "admission",
        "weight": 100,
        "actions": [
            {"id": "assess_risk", "concept": "RISK_ASSESSMENT", "weight": 40,
             "constraint": {"kind": "time", "reference_event": "ADMISSION",
                            "trapezoid": {"a": 0, "b": 0, "c": 72, "d": 120}}},
            {"id": "check_skin", "concept": "SKIN_CHECK", "weight": 60,
             "constraint": {"kind": "cyclical", "expected_cardinality": 3, "window": 168}},
        ],
    }],
})

record = PatientRecord(
    patient_id="demo-patient",
    ward="W1",
    admission=at(0),
    discharge=at(168),
    events=(
        Event("demo-patient", "ADMISSION", "observation", at(0)),
        Event("demo-patient", "RISK_ASSESSMENT", "performance", at(80)),
        Event("demo-patient", "SKIN_CHECK", "performance", at(24)),
        Event("demo-patient", "SKIN_CHECK", "performance", at(90)),
        Event("demo-patient", "DISCHARGE", "observation", at(168)),
    ),
)

tree = score_protocol(record, protocol, Interval(at(0), at(168)))


def show(node, depth=0):
    value = "N/A" if node.value is None else f"{node.value:.4f} ({node.display_percent}%)"
    print(f"{'  ' * depth}{node.kind:<9} {node.label:<14} {value}")
    for child in node.children:
        show(child, depth + 1)


show(tree)
print()
print("as JSON:", list(node_to_json(tree)))
