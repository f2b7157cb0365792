import numpy as np
import pytest

from epipencil.correspondences import CorrSet
from epipencil.errors import DegenerateDataError
from epipencil.fundamental import epipoles_from_f
from epipencil.projective import display_hom, proj_equal
from epipencil.scenes import (
    NoiseSpec,
    add_noise,
    bench_csv,
    bench_noise,
    eight_point,
    generate_scene,
    scene_s1,
)


def test_s1_epipoles_at_principal_point():
    s = scene_s1()
    # projection of the opposite camera center: K (0, 0, 10)^T = (3200, 2400, 10)
    assert proj_equal(s.e_true, np.array([3200.0, 2400.0, 10.0]), 1e-9)
    assert proj_equal(s.e_true, np.array([320.0, 240.0, 1.0]), 1e-9)
    assert proj_equal(s.e_prime_true, np.array([320.0, 240.0, 1.0]), 1e-9)
    assert len(s.corr) == 12


def test_generation_deterministic():
    a = generate_scene(mode="facing", seed=123)
    b = generate_scene(mode="facing", seed=123)
    np.testing.assert_array_equal(a.points3d, b.points3d)
    np.testing.assert_array_equal(a.corr.pts1, b.corr.pts1)
    np.testing.assert_array_equal(a.r, b.r)
    assert a.to_json() == b.to_json()


def test_scene_invariants_over_seeds():
    for seed in range(1000):
        for mode in ("facing", "lateral"):
            generate_scene(mode=mode, seed=seed).validate()


def test_oracle_triangle_agreement():
    # three independent routes to the image-2 epipole coincide: the 5-point
    # solver, the 8-point baseline's null space, and the ground truth
    from epipencil.solvers import solve_five

    for seed in (1, 8, 21, 34):
        s = generate_scene(mode="facing", seed=seed)
        est = solve_five(s.e_true, s.corr.subset(range(5)))
        e2_eight = epipoles_from_f(eight_point(s.corr))[1]
        assert proj_equal(est.e_prime, s.e_prime_true, 1e-6)
        assert proj_equal(e2_eight, s.e_prime_true, 1e-6)
        assert proj_equal(est.e_prime, e2_eight, 1e-6)


def test_facing_epipoles_inside_frame():
    for seed in range(25):
        s = generate_scene(mode="facing", seed=seed)
        for e in (s.e_true, s.e_prime_true):
            d = display_hom(e)
            assert 0 <= d[0] <= 640 and 0 <= d[1] <= 480


def test_lateral_epipoles_outside_frame():
    for seed in range(25):
        s = generate_scene(mode="lateral", seed=seed)
        for e in (s.e_true, s.e_prime_true):
            n = np.linalg.norm(e)
            if abs(e[2]) < 1e-9 * n:
                continue  # ideal: trivially outside
            d = display_hom(e)
            assert not (0 <= d[0] <= 640 and 0 <= d[1] <= 480)


def test_scene_json_shape():
    d = generate_scene(mode="facing", seed=5).to_json_dict()
    assert len(d["F"]) == 9
    assert len(d["points1"]) == len(d["points2"]) == 12
    assert len(d["epipole1"]) == 3


# ---------- eight point -----------------------------------------------------------

def test_eight_point_matches_truth():
    s = scene_s1()
    f = eight_point(s.corr)
    err = min(np.linalg.norm(f.m - s.f_true.m), np.linalg.norm(f.m + s.f_true.m))
    assert err < 1e-8


def test_eight_point_epipoles_match_truth():
    for seed in (0, 3, 9):
        s = generate_scene(mode="facing", seed=seed)
        e1, e2 = epipoles_from_f(eight_point(s.corr))
        assert proj_equal(e1, s.e_true, 1e-6)
        assert proj_equal(e2, s.e_prime_true, 1e-6)


def test_eight_point_degenerate_duplicates():
    s = scene_s1()
    pts1 = np.tile(s.corr.pts1[0], (9, 1))
    pts2 = np.tile(s.corr.pts2[0], (9, 1))
    with pytest.raises(DegenerateDataError):
        eight_point(CorrSet(pts1, pts2))


# ---------- noise ------------------------------------------------------------------

def test_noise_sigma_zero_is_identity():
    s = scene_s1()
    out = add_noise(s.corr, NoiseSpec(0.0, seed=1))
    np.testing.assert_allclose(out.pts1, s.corr.pts1 / s.corr.pts1[:, 2:3])
    np.testing.assert_allclose(out.pts2, s.corr.pts2 / s.corr.pts2[:, 2:3])


def test_noise_statistics():
    rng_pts = np.zeros((5000, 2))
    corr = CorrSet(rng_pts + [[100, 100]], rng_pts + [[200, 200]])
    noisy = add_noise(corr, NoiseSpec(1.0, seed=7))
    d = noisy.pts1[:, :2] - 100.0
    assert abs(np.std(d) - 1.0) < 0.05


def test_noise_deterministic():
    s = scene_s1()
    a = add_noise(s.corr, NoiseSpec(1.5, seed=3))
    b = add_noise(s.corr, NoiseSpec(1.5, seed=3))
    np.testing.assert_array_equal(a.pts1, b.pts1)
    np.testing.assert_array_equal(a.pts2, b.pts2)


def test_noise_perturbs_epipole_on_request():
    s = scene_s1()
    corr = CorrSet(s.corr.pts1, s.corr.pts2, epipole1=display_hom(s.e_true))
    kept = add_noise(corr, NoiseSpec(2.0, seed=4))
    assert proj_equal(kept.epipole1, s.e_true)
    moved = add_noise(corr, NoiseSpec(2.0, seed=4, perturb_epipole=True))
    assert not proj_equal(moved.epipole1, s.e_true, 1e-9)


# ---------- bench ------------------------------------------------------------------

def test_bench_noiseless_solve5():
    rows = bench_noise("solve5", [0.0], trials=10, seed=0)
    assert rows[0]["fail_rate"] == 0.0
    assert rows[0]["median_px"] < 1e-4


def test_bench_csv_deterministic():
    a = bench_csv(bench_noise("solve5", [0.0, 1.0], trials=5, seed=2))
    b = bench_csv(bench_noise("solve5", [0.0, 1.0], trials=5, seed=2))
    assert a == b
    assert a.splitlines()[0] == "method,sigma,median_px,p90_px,fail_rate"
    assert len(a.splitlines()) == 3


def test_bench_rejects_unknown_method():
    with pytest.raises(ValueError):
        bench_noise("solve7", [0.0], trials=1)


def test_bench_solve4_runs():
    rows = bench_noise("solve4", [0.0], trials=5, seed=1)
    assert rows[0]["fail_rate"] == 0.0
    # noiseless conic passes through the true epipole; only the polyline
    # discretization separates them
    assert rows[0]["median_px"] < 5.0
