"""Regenerate the annotator's contract fixtures.

Writes frontend/fixtures/: session files (what the UI saves), the
canonical solver requests each session must reproduce byte-for-byte, and
the captured service responses (exact bytes). Rerun after any wire-format
change:  python3 scripts/generate_ui_fixtures.py
"""

from __future__ import annotations

import json
import pathlib
import sys

import numpy as np
from fastapi.testclient import TestClient

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from epipencil.projective import display_hom  # noqa: E402
from epipencil.scenes import scene_s1  # noqa: E402
from epipencil.service.app import create_app  # noqa: E402

OUT = pathlib.Path(__file__).resolve().parent.parent / "frontend" / "fixtures"


def jsnum(x, decimals=2):
    """Round and emit ints for integral values so Python's json and
    JavaScript's JSON.stringify print identical bytes."""
    v = round(float(x), decimals)
    return int(v) if float(v).is_integer() else v


def jspoint(p, decimals=2):
    return [jsnum(p[0], decimals), jsnum(p[1], decimals)]


def canonical_request(points1, points2, *, epipole1=None, epiline1=None, size=(640, 480)):
    """Key order mirrors the UI's request builder exactly."""
    req = {"points1": points1, "points2": points2}
    if epiline1 is not None:
        req["epiline1"] = epiline1
    else:
        req["epipole1"] = epipole1
    req["image_size1"] = list(size)
    req["image_size2"] = list(size)
    return req


def session_file(req, ids):
    body = dict(req)
    body["ui"] = {"version": 1, "pair_ids": ids, "next_id": (max(ids) + 1) if ids else 0}
    return body


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    scene = scene_s1()
    pts1 = [jspoint(p[:2] / p[2]) for p in scene.corr.pts1]
    pts2 = [jspoint(p[:2] / p[2]) for p in scene.corr.pts2]
    e = display_hom(scene.e_true)
    epipole = [jsnum(e[0]), jsnum(e[1])]
    line = np.asarray(scene.held_out_line1(7), dtype=float)
    line = line / np.hypot(line[0], line[1])
    epiline = [jsnum(v, 4) for v in line]

    cases = {
        "4pair": canonical_request(pts1[:4], pts2[:4], epipole1=epipole),
        "5pair": canonical_request(pts1[:5], pts2[:5], epipole1=epipole),
        "6pair": canonical_request(pts1[:6], pts2[:6], epiline1=epiline),
        # integer points exactly collinear with the integer epipole, so the
        # redundant-configuration gate trips regardless of quantization
        "degenerate": canonical_request(
            [[120, 140], [520, 340], pts1[2], pts1[3]],
            pts2[:4],
            epipole1=[320, 240],
        ),
    }

    client = TestClient(create_app())
    manifest = []
    for name, req in cases.items():
        request_bytes = json.dumps(req, separators=(",", ":"))
        ids = list(range(len(req["points1"])))
        (OUT / f"request_{name}.json").write_text(request_bytes)
        (OUT / f"session_{name}.json").write_text(
            json.dumps(session_file(req, ids), separators=(",", ":"))
        )
        resp = client.post(
            "/api/solve",
            content=request_bytes.encode(),
            headers={"Content-Type": "application/json"},
        )
        (OUT / f"response_{name}.json").write_text(resp.text)
        manifest.append({"name": name, "status": resp.status_code})
        print(f"{name}: HTTP {resp.status_code}, {len(resp.text)} bytes")
    (OUT / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    main()
