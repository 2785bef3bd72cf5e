"""Exercise the HTTP API in-process (no network needed).

The same app is served by `qa serve --protocol ... --events ...`; here it is
mounted on a test client so the demo is self-contained.
"""

import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from guideline_qa.cli import main
from guideline_qa.service import create_app, load_snapshot

root = Path(__file__).resolve().parent.parent
protocol_path = root / "protocols" / "pressure_ulcer.json"

with tempfile.TemporaryDirectory() as tmp:
    events = Path(tmp) / "events.csv"
    main(["generate", "--protocol", str(protocol_path), "--n", "6",
          "--seed", "1", "--out", str(events)])

    client = TestClient(create_app(load_snapshot(str(protocol_path), str(events))))

    patients = client.get("/api/patients").json()
    print("patients:", [p["patient_id"] for p in patients])

    tree = client.get("/api/scores").json()
    print(f"group score: {tree['value']} ({tree['display_percent']}%), "
          f"{len(tree['children'])} stages")

    follow_up = client.get("/api/scores", params={"stage": "follow_up"}).json()
    print("follow-up actions:", [c["label"] for c in follow_up["children"]])

    drill = client.get(f"/api/scores/{patients[0]['patient_id']}/tree").json()
    print(f"per-patient tree root: {drill['kind']} {drill['label']}")

    bad = client.get("/api/scores", params={"from": "2017-06-01T00:00:00Z",
                                            "to": "2017-01-01T00:00:00Z"})
    print(f"invalid range -> HTTP {bad.status_code}: {bad.json()['detail']}")
