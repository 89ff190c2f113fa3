import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from starlette.testclient import TestClient

from shadow_orbits.service.app import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok" and body["service"] == "shadow-orbits"


def test_verify_exp_endpoint(client):
    resp = client.post("/verify", json={"target": "exp", "algebra": "gl2", "p": 5, "r": 2})
    body = resp.json()
    assert resp.status_code == 200 and body["status"] == "ok"
    assert body["report"]["instances"] == 625


def test_verify_thm_endpoint(client):
    resp = client.post("/verify", json={"target": "thmD", "algebra": "sl2", "p": 3, "r": 1})
    assert resp.json()["status"] == "ok"


def test_verify_infeasible_sl3(client):
    resp = client.post("/verify", json={"target": "thmA", "algebra": "sl3", "p": 5, "r": 2})
    body = resp.json()
    assert body["status"] == "infeasible" and "SL_3" in body["message"]


def test_verify_bound_gate(client):
    resp = client.post("/verify", json={"target": "thmA", "algebra": "sl2", "p": 5, "r": 2, "bound": 1000})
    assert resp.json()["status"] == "infeasible"


def test_validation_errors(client):
    assert client.post("/table", json={"q": 9}).status_code == 422
    assert client.post("/table", json={"q": 3}).status_code == 422
    assert client.post("/verify", json={"target": "exp", "p": 4}).status_code == 422
    assert client.post("/verify", json={"target": "nope", "p": 5}).status_code == 422
    assert client.post("/zeta", json={"algebra": "sl2", "p": 11}).status_code == 422
    assert client.post("/shadow", json={"algebra": "sl3", "p": 5, "element": [[0, 1], [0, 0]]}).status_code == 422


def test_table_endpoint_q5(client):
    resp = client.post("/table", json={"q": 5})
    body = resp.json()
    assert body["status"] == "ok" and body["report"]["all_match"]
    rows = {row["S"]: row for row in body["report"]["rows"]}
    assert rows["L"]["transitions"]["R"]["value"] == 620


def test_table_oracle_gate(client):
    body = client.post("/table", json={"q": 11}).json()
    assert body["status"] == "infeasible"
    body = client.post("/table", json={"q": 11, "oracle": False}).json()
    assert body["status"] == "ok"


def test_zeta_endpoints(client):
    body = client.post("/zeta", json={"algebra": "sl2", "p": 7, "m": 1}).json()
    assert body["status"] == "ok"
    assert body["report"]["level1_count"] == 342
    body = client.post("/zeta", json={"algebra": "sl3", "q": 11, "m": 1}).json()
    assert body["status"] == "ok"
    assert body["report"]["identity_with_table_route"]
    assert body["report"]["truncation"][0]["value"] == 11**8


def test_shadow_endpoint(client):
    body = client.post(
        "/shadow",
        json={"algebra": "sl3", "p": 5, "r": 1, "element": [[0, 1, 0], [0, 0, 0], [0, 0, 0]]},
    ).json()
    assert body["status"] == "ok"
    rep = body["report"]
    assert rep["label"] == "J" and rep["shadowOrder"] == 500 and rep["d_S"] == 4 and rep["z_S"] == 1


def test_shadow_endpoint_recursive(client):
    body = client.post(
        "/shadow",
        json={"algebra": "sl2", "p": 5, "r": 2, "element": [[0, 1], [0, 0]], "strategy": "recursive"},
    ).json()
    assert body["status"] == "ok" and body["report"]["provenance"] == "recursive"
