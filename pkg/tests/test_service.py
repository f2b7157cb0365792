import json
from importlib import resources

import jsonschema
import numpy as np
import pytest
from fastapi.testclient import TestClient

from epipencil.projective import display_hom, proj_equal
from epipencil.scenes import scene_s1
from epipencil.service.app import create_app


@pytest.fixture(scope="module")
def s1():
    return scene_s1()


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def _schema(name):
    text = (resources.files("epipencil") / "schemas" / name).read_text()
    return json.loads(text)


def _problem_body(scene, n, line_index=7):
    pts1 = (scene.corr.pts1[:n, :2] / scene.corr.pts1[:n, 2:3]).tolist()
    pts2 = (scene.corr.pts2[:n, :2] / scene.corr.pts2[:n, 2:3]).tolist()
    body = {"points1": pts1, "points2": pts2, "image_size1": [640, 480],
            "image_size2": [640, 480]}
    if n in (4, 5):
        e = display_hom(scene.e_true)
        body["epipole1"] = [float(e[0]), float(e[1])]
    else:
        body["epiline1"] = [float(v) for v in scene.held_out_line1(line_index)]
    return body


def test_health(client):
    r = client.get("/api/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


def test_solve_five_endpoint(client, s1):
    r = client.post("/api/solve", json=_problem_body(s1, 5))
    assert r.status_code == 200
    out = r.json()
    jsonschema.validate(out, _schema("solve_response.schema.json"))
    assert out["method"] == "five_cremona"
    assert proj_equal(out["epipole"], s1.e_prime_true, 1e-6)
    assert out["residual_rms"] < 1e-8


def test_solve_four_endpoint(client, s1):
    r = client.post("/api/solve", json=_problem_body(s1, 4))
    assert r.status_code == 200
    out = r.json()
    jsonschema.validate(out, _schema("solve_response.schema.json"))
    assert out["method"] == "four_conic"
    assert len(out["conic"]) == 6
    assert out["branches"]


def test_solve_six_endpoint(client, s1):
    r = client.post("/api/solve", json=_problem_body(s1, 6))
    assert r.status_code == 200
    out = r.json()
    jsonschema.validate(out, _schema("solve_response.schema.json"))
    assert out["method"] == "six_linesearch"
    assert 1 <= len(out["candidates"]) <= 3
    assert any(
        proj_equal(c["epipole1"], s1.e_true, 1e-5)
        and proj_equal(c["epipole2"], s1.e_prime_true, 1e-5)
        for c in out["candidates"]
    )


def test_solve_with_fmatrix(client, s1):
    r = client.post("/api/solve?fmatrix=true", json=_problem_body(s1, 5))
    assert r.status_code == 200
    out = r.json()
    jsonschema.validate(out, _schema("solve_response.schema.json"))
    f = np.array(out["fmatrix"]).reshape(3, 3)
    gap = min(np.linalg.norm(f - s1.f_true.m), np.linalg.norm(f + s1.f_true.m))
    assert gap < 1e-6


def test_fmatrix_endpoint(client, s1):
    e1 = display_hom(s1.e_true)
    e2 = display_hom(s1.e_prime_true)
    body = {
        "points1": (s1.corr.pts1[:5, :2] / s1.corr.pts1[:5, 2:3]).tolist(),
        "points2": (s1.corr.pts2[:5, :2] / s1.corr.pts2[:5, 2:3]).tolist(),
        "epipole1": [float(e1[0]), float(e1[1])],
        "epipole2": [float(e2[0]), float(e2[1])],
    }
    r = client.post("/api/fmatrix", json=body)
    assert r.status_code == 200
    out = r.json()
    jsonschema.validate(out, _schema("fmatrix_response.schema.json"))
    assert out["mean_sym_distance_px"] < 1e-6
    assert len(out["lines1"]) == len(out["lines2"]) == 5
    # every transferred line passes through the recovered epipole
    e2h = np.array(out["epipole2"])
    for line in out["lines2"]:
        l = np.array(line)
        assert abs(l @ e2h) < 1e-6 * np.linalg.norm(l) * np.linalg.norm(e2h)


def test_empty_body_is_400(client):
    r = client.post("/api/solve", content=b"")
    assert r.status_code == 400
    jsonschema.validate(r.json(), _schema("error.schema.json"))


def test_missing_epipole_is_400(client, s1):
    body = _problem_body(s1, 5)
    del body["epipole1"]
    r = client.post("/api/solve", json=body)
    assert r.status_code == 400
    out = r.json()
    jsonschema.validate(out, _schema("error.schema.json"))
    assert out["error"]["code"] == "invalid_input"


def test_degeneracy_is_422(client, s1):
    body = _problem_body(s1, 4)
    # epipole on the line through the first two marks duplicates a pencil line
    p0 = (s1.corr.pts1[0] / s1.corr.pts1[0][2])[:2]
    p1 = (s1.corr.pts1[1] / s1.corr.pts1[1][2])[:2]
    body["epipole1"] = [float(v) for v in 0.5 * (p0 + p1)]
    r = client.post("/api/solve", json=body)
    assert r.status_code == 422
    out = r.json()
    jsonschema.validate(out, _schema("error.schema.json"))
    assert out["error"]["code"] == "redundant_configuration"


def test_root_serves_ui_or_placeholder(client):
    r = client.get("/")
    assert r.status_code == 200
    assert "<html" in r.text.lower()


def test_problem_file_schema_accepts_bodies(s1):
    schema = _schema("problem_file.schema.json")
    for n in (4, 5, 6):
        jsonschema.validate(_problem_body(s1, n), schema)
