import pytest
from fastapi.testclient import TestClient

from api.app import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def upload(path):
    return {"file": (path.name, path.read_bytes(), "text/csv")}


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "healthy"}


def test_score_tests_over_upload(client, toy_csv):
    response = client.post(
        "/api/analysis/test",
        files=upload(toy_csv),
        data={"coordinates": "1", "lambda_mode": "rate", "lambda_value": "1.0"},
    )
    assert response.status_code == 200
    body = response.json()
    assert (body["n"], body["p"], body["gamma_mode"]) == (40, 2, "direct")
    assert [row["name"] for row in body["results"]] == ["x1"]
    assert body["results"][0]["p_value"] < 0.01


def test_fdr_over_upload(client, tmp_path, rng):
    X = rng.normal(size=(60, 5))
    y = 3 * X[:, 0] + rng.normal(size=60)
    lines = ["x1,x2,x3,x4,x5,y"] + [",".join(f"{v:.8f}" for v in (*row, t)) for row, t in zip(X, y)]
    path = tmp_path / "five.csv"
    path.write_text("\n".join(lines) + "\n")
    response = client.post(
        "/api/analysis/fdr",
        files=upload(path),
        data={"alpha": "0.2", "lambda_mode": "rate", "lambda_value": "1.0", "h": "3"},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["p"] == 5
    assert body["n_rejected"] == len(body["rejected"])
    assert 1 in [row["j"] for row in body["rejected"]]


def test_lone_cap_coefficient_is_rejected(client, toy_csv):
    response = client.post(
        "/api/analysis/fdr",
        files=upload(toy_csv),
        data={"cap_coefficient": "0.75", "lambda_mode": "rate"},
    )
    assert response.status_code == 400
    assert "together" in response.json()["detail"]


def test_malformed_csv(client, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,y\n1,2,3\n4,five,6\n")
    response = client.post("/api/analysis/test", files=upload(path))
    assert response.status_code == 400
    assert "line 3" in response.json()["detail"]


def test_unknown_response_column(client, toy_csv):
    response = client.post("/api/analysis/test", files=upload(toy_csv), data={"response": "z"})
    assert response.status_code == 400


def test_bad_test_config(client, toy_csv):
    response = client.post("/api/analysis/test", files=upload(toy_csv), data={"h": "0"})
    assert response.status_code == 400


def test_small_simulation(client):
    response = client.post("/api/simulation/run", json={
        "study": "rejection", "model": "I", "n": 60, "p": 10, "replications": 2,
        "lambda_mode": "rate", "coordinates": [1, 10], "seed": 3,
    })
    assert response.status_code == 200
    body = response.json()
    assert [row["j"] for row in body["rejection_rates"]] == [1, 10]
    assert body["fdr"] is None


def test_power_sweep_request(client):
    response = client.post("/api/simulation/run", json={
        "study": "power-sweep", "n": 60, "p": 10, "replications": 1, "h_max": 2,
        "lambda_mode": "rate", "coordinates": [2],
    })
    assert response.status_code == 200
    assert [row["h"] for row in response.json()["power_sweep"]] == [1, 2]


def test_request_validation(client):
    response = client.post("/api/simulation/run", json={"n": 5})
    assert response.status_code == 422


def test_simulation_with_lone_fallback_coefficient(client):
    response = client.post("/api/simulation/run", json={
        "study": "fdr", "model": "IV", "n": 60, "p": 10, "replications": 1,
        "lambda_mode": "rate", "fallback_coefficient": 4.0,
    })
    assert response.status_code == 400
