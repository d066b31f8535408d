"""Tests for the HTTP service endpoints."""
import math

import pytest
from fastapi.testclient import TestClient

from alet.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


FLAT_BODY = {
    "mode": "flat",
    "seed": 5,
    "oracle": {
        "kind": "synthetic",
        "landscape": {
            "kind": "dent",
            "p": 2,
            "normal_axes": [0],
            "offsets": [0.0],
            "curvatures": [1.0],
        },
    },
    "engine": {"r_fin": math.pi / 8, "r0": math.pi, "noise": {"kind": "exact"}},
    "flat": {"axes": [0]},
}


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok"
    assert body["version"]


def test_validate_resolves_defaults(client):
    resp = client.post("/validate", json=FLAT_BODY)
    assert resp.status_code == 200
    body = resp.json()
    assert body["valid"] is True
    assert body["config"]["engine"]["delta_noise"] == 0.05


def test_run_flat_returns_report_and_artifacts(client):
    resp = client.post("/run", json=FLAT_BODY)
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok"
    assert body["exit_code"] == 0
    assert body["report"]["results"]["minimizer_in_region"] is True
    paths = [a["path"] for a in body["artifacts"]]
    assert "rounds.csv" in paths and "survivors.csv" in paths
    rounds = next(a["content"] for a in body["artifacts"] if a["path"] == "rounds.csv")
    assert rounds.splitlines()[0] == "t,r_t,N_t,ucb_star,kept,queries_cum"
    assert "wall_seconds" in body["timing"]


def test_run_is_deterministic_across_requests(client):
    first = client.post("/run", json=FLAT_BODY).json()
    second = client.post("/run", json=FLAT_BODY).json()
    assert first["report"] == second["report"]
    assert first["artifacts"] == second["artifacts"]


def test_invalid_config_gets_422_with_field_paths(client):
    bad = dict(FLAT_BODY)
    bad = {**bad, "engine": {**bad["engine"], "shrink": 0.5}}
    resp = client.post("/run", json=bad)
    assert resp.status_code == 422
    locs = [err["loc"] for err in resp.json()["detail"]]
    assert any("shrink" in loc for loc in locs)


def test_unknown_field_gets_422(client):
    bad = {**FLAT_BODY, "surprise": 1}
    resp = client.post("/run", json=bad)
    assert resp.status_code == 422
    assert any("surprise" in err["loc"] for err in resp.json()["detail"])


def test_anomaly_surfaces_exit_code(client):
    body = {
        **FLAT_BODY,
        "engine": {
            "r_fin": math.pi / 8,
            "r0": math.pi,
            "lipschitz": 0.01,
            "noise": {"kind": "exact"},
        },
    }
    resp = client.post("/run", json=body)
    assert resp.status_code == 200
    payload = resp.json()
    assert payload["status"] == "certificate-anomaly"
    assert payload["exit_code"] == 3
