import time

import pytest
from fastapi.testclient import TestClient

from hitlbo.server import RunRegistry, create_app

GRAPH = "p edge 4 5\ne 1 2\ne 2 3\ne 1 3\ne 3 4\ne 1 4\n"


@pytest.fixture
def client():
    registry = RunRegistry(expert_timeout=30.0)
    with TestClient(create_app(registry)) as c:
        yield c


def start_run(client, **config):
    cfg = {"s": 2, "x": 4, "max_expansions": 3, "seed": 11}
    cfg.update(config)
    resp = client.post("/api/v1/runs", json={
        "instance": {"text": GRAPH, "format": "graph"},
        "config": cfg,
    })
    assert resp.status_code == 201
    return resp.json()["run_id"]


def wait_for_pending(client, timeout=5.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        pending = client.get("/api/v1/queries?state=pending").json()
        if pending:
            return pending
        time.sleep(0.01)
    raise AssertionError("no pending query appeared")


def answer_until_done(client, run_id, body, timeout=10.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        for q in client.get("/api/v1/queries?state=pending").json():
            r = client.post(f"/api/v1/queries/{q['query_id']}/response", json=body)
            assert r.status_code == 200, r.text
        detail = client.get(f"/api/v1/runs/{run_id}").json()
        if detail["status"] == "done":
            return detail
        time.sleep(0.01)
    raise AssertionError("run did not finish")


class TestProtocol:
    def test_full_round_trip(self, client):
        run_id = start_run(client)
        pending = wait_for_pending(client)
        q = pending[0]
        assert q["run_id"] == run_id
        assert q["cell"]["size"] == 8
        assert set(q) >= {"query_id", "prefix", "stats", "sibling"}
        detail = answer_until_done(client, run_id,
                                   {"kernel": "wiener", "variance": 1.0, "mean": 0.0})
        assert detail["result"]["best_value"] == 3.0
        summaries = client.get("/api/v1/runs").json()
        assert summaries[0]["run_id"] == run_id
        assert summaries[0]["status"] == "done"

    def test_contradiction_rejected_with_409(self, client):
        run_id = start_run(client, seed=13)
        first = wait_for_pending(client)[0]
        ok = client.post(f"/api/v1/queries/{first['query_id']}/response",
                         json={"kernel": "wiener", "variance": 1.0})
        assert ok.status_code == 200
        second = wait_for_pending(client)[0]
        conflict = client.post(f"/api/v1/queries/{second['query_id']}/response",
                               json={"kernel": "wiener", "variance": 5.0})
        assert conflict.status_code == 409
        assert "contradicts" in conflict.json()["detail"]
        # the query stays pending and a consistent answer still lands
        still = client.get("/api/v1/queries?state=pending").json()
        assert second["query_id"] in [q["query_id"] for q in still]
        detail = answer_until_done(client, run_id,
                                   {"kernel": "wiener", "variance": 1.0})
        assert detail["status"] == "done"

    def test_unknown_ids_404(self, client):
        assert client.get("/api/v1/runs/ghost").status_code == 404
        r = client.post("/api/v1/queries/ghost/response",
                        json={"kernel": "wiener", "variance": 1.0})
        assert r.status_code == 404

    def test_schema_validation_422(self, client):
        start_run(client, seed=17)
        q = wait_for_pending(client)[0]
        bad = client.post(f"/api/v1/queries/{q['query_id']}/response",
                          json={"kernel": "wiener", "variance": -2.0})
        assert bad.status_code == 422

    def test_run_detail_shows_cells(self, client):
        run_id = start_run(client, seed=19)
        wait_for_pending(client)
        detail = client.get(f"/api/v1/runs/{run_id}").json()
        assert detail["status"] == "running"
        assert detail["cells"][0]["lo"] == 1
        assert detail["config"]["s"] == 2

    def test_bad_instance_400(self, client):
        resp = client.post("/api/v1/runs", json={
            "instance": {"text": "e 1 2", "format": "graph"}, "config": {}})
        assert resp.status_code == 400

    def test_unanswered_run_suspends_with_token(self):
        registry = RunRegistry(expert_timeout=0.2)
        with TestClient(create_app(registry)) as client:
            run_id = start_run(client, seed=29)
            deadline = time.monotonic() + 5
            detail = client.get(f"/api/v1/runs/{run_id}").json()
            while detail["status"] == "running" and time.monotonic() < deadline:
                time.sleep(0.02)
                detail = client.get(f"/api/v1/runs/{run_id}").json()
            assert detail["status"] == "suspended"
            assert detail["resume_token"].startswith(run_id)
            assert "timeout" in detail["error"]
