import json

import pytest
from fastapi.testclient import TestClient

from guideline_qa.cli import main
from guideline_qa.service import create_app, load_snapshot, score_tree_json

from .conftest import PROTOCOL_PATH


@pytest.fixture(scope="module")
def events_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("svc") / "events.csv"
    rc = main([
        "generate", "--protocol", str(PROTOCOL_PATH), "--n", "4",
        "--seed", "7", "--out", str(out),
    ])
    assert rc == 0
    return out


@pytest.fixture(scope="module")
def snapshot(events_csv):
    return load_snapshot(str(PROTOCOL_PATH), str(events_csv))


@pytest.fixture(scope="module")
def client(snapshot):
    return TestClient(create_app(snapshot))


class TestProtocolEndpoint:
    def test_echoes_protocol(self, client, shipped_protocol):
        resp = client.get("/api/protocol")
        assert resp.status_code == 200
        doc = resp.json()
        assert doc["id"] == shipped_protocol.id
        assert [s["id"] for s in doc["stages"]] == [s.id for s in shipped_protocol.stages]


class TestPatientsEndpoint:
    def test_lists_patients(self, client):
        resp = client.get("/api/patients")
        assert resp.status_code == 200
        assert [p["patient_id"] for p in resp.json()] == ["p0001", "p0002", "p0003", "p0004"]

    def test_ward_filter(self, client, snapshot):
        ward = snapshot.cohort.patients[0].ward
        resp = client.get("/api/patients", params={"ward": ward})
        assert resp.status_code == 200
        assert all(p["ward"] == ward for p in resp.json())
        assert resp.json()

    def test_unknown_ward_404(self, client):
        resp = client.get("/api/patients", params={"ward": "atlantis"})
        assert resp.status_code == 404
        body = resp.json()
        assert set(body) == {"error", "path", "detail"}
        assert body["error"] == "not_found"


class TestScoresEndpoint:
    def test_tree_shape(self, client):
        resp = client.get("/api/scores")
        assert resp.status_code == 200
        tree = resp.json()
        assert tree["kind"] == "group"
        assert len(tree["children"]) == 5
        assert tree["value"] == 1.0

    def test_byte_identical_with_cli(self, client, snapshot, tmp_path):
        resp = client.get("/api/scores", params={"stage": "follow_up"})
        expected = json.dumps(
            score_tree_json(snapshot, stage_id="follow_up"), indent=2
        ).encode()
        assert resp.content == expected

    def test_repeat_request_identical(self, client):
        a = client.get("/api/scores").content
        b = client.get("/api/scores").content
        assert a == b

    def test_bad_range_400(self, client):
        resp = client.get(
            "/api/scores",
            params={"from": "2017-06-01T00:00:00Z", "to": "2017-01-01T00:00:00Z"},
        )
        assert resp.status_code == 400
        body = resp.json()
        assert body["error"] == "bad_filter"
        assert set(body) == {"error", "path", "detail"}

    def test_bad_timestamp_400(self, client):
        resp = client.get("/api/scores", params={"from": "whenever"})
        assert resp.status_code == 400

    def test_unknown_stage_404(self, client):
        resp = client.get("/api/scores", params={"stage": "nope"})
        assert resp.status_code == 404

    def test_unknown_patient_404(self, client):
        resp = client.get("/api/scores", params={"patient": "p9999"})
        assert resp.status_code == 404

    def test_patient_filter(self, client):
        resp = client.get("/api/scores", params={"patient": "p0002"})
        assert resp.status_code == 200
        assert resp.json()["population"] == ["p0002"]


class TestPatientTreeEndpoint:
    def test_drill_down(self, client):
        resp = client.get("/api/scores/p0001/tree")
        assert resp.status_code == 200
        tree = resp.json()
        assert tree["kind"] == "protocol"
        stage = tree["children"][1]
        assert stage["kind"] == "stage"
        assert stage["children"], "actions should be present for drill-down"

    def test_unknown_patient_404(self, client):
        assert client.get("/api/scores/p9999/tree").status_code == 404


class TestCompareEndpoint:
    def test_two_frames(self, client, snapshot):
        window = snapshot.default_window()
        mid = window.start + (window.end - window.start) / 2
        fmt = lambda ts: ts.isoformat().replace("+00:00", "Z")
        resp = client.get(
            "/api/compare",
            params={
                "frameA_from": fmt(window.start),
                "frameA_to": fmt(mid),
                "frameB_from": fmt(mid),
                "frameB_to": fmt(window.end),
            },
        )
        assert resp.status_code == 200
        rows = resp.json()
        assert rows and {"path", "kind", "value_a", "value_b", "delta"} <= set(rows[0])

    def test_missing_params_400(self, client):
        assert client.get("/api/compare").status_code == 400


class TestReload:
    def test_reload_swaps_snapshot(self, events_csv):
        snapshot = load_snapshot(str(PROTOCOL_PATH), str(events_csv))
        client = TestClient(create_app(snapshot))
        before = client.get("/api/scores").json()
        resp = client.post("/api/reload")
        assert resp.status_code == 200
        assert resp.json()["reloaded"] is True
        after = client.get("/api/scores").json()
        assert after == before  # same files -> same snapshot content
