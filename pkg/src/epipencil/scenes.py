"""Synthetic two-view ground truth, the classic 8-point baseline, and the
noise bench.

Every numeric expectation in the test suite traces back to scenes built
here: cameras and 3D points are explicit, so the true fundamental matrix
K2^-T [t]x R K1^-1 and the true epipoles (projections of the opposite
camera centers) come straight from the projection formulas.

Randomness uses numpy's default_rng (PCG64), which is seedable and
stable across platforms, so benchmark CSV fixtures are reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .correspondences import CorrSet
from .errors import DegenerateDataError, GenerationFailureError
from .fundamental import FundMatrix
from .projective import as_hom, display_hom, normalize_hom, proj_equal

FACING_DISTANCE = 10.0
FACING_BOX = ((-2.0, 2.0), (-2.0, 2.0), (3.0, 7.0))
LATERAL_BASELINE = 2.0
LATERAL_BOX = ((-0.5, 2.5), (-1.5, 1.5), (4.0, 8.0))
DEFAULT_FOCAL = 800.0
_MIN_DEPTH = 0.5
_EPIPOLE_MARGIN = 8.0


def _rot_x(a: float) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]], dtype=float)


def _rot_y(a: float) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]], dtype=float)


def _cross_matrix(v: np.ndarray) -> np.ndarray:
    return np.array(
        [[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]], dtype=float
    )


@dataclass
class NoiseSpec:
    """Gaussian pixel noise: std ``sigma`` per coordinate, reproducible per seed."""

    sigma: float
    seed: int = 0
    perturb_epipole: bool = False

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")


@dataclass
class Scene:
    """Two calibrated cameras, 3D points, their exact projections, and the
    ground-truth epipolar geometry."""

    mode: str
    seed: int
    image_size: tuple
    k1: np.ndarray
    k2: np.ndarray
    r: np.ndarray
    t: np.ndarray
    points3d: np.ndarray
    corr: CorrSet
    f_true: FundMatrix
    e_true: np.ndarray
    e_prime_true: np.ndarray

    def validate(self, tol: float = 1e-10) -> None:
        p1 = self.corr.conditioned1
        p2 = self.corr.conditioned2
        f_n = self.corr.t2_inv.T @ self.f_true.m @ self.corr.t1_inv
        f_n = f_n / np.linalg.norm(f_n)
        res = np.abs(np.einsum("ni,ij,nj->n", p2, f_n, p1))
        if np.max(res) >= tol:
            raise AssertionError(f"incidence residual {np.max(res):.3g} >= {tol}")
        center2 = -self.r.T @ self.t
        if not proj_equal(self.e_true, self.k1 @ center2, 1e-9):
            raise AssertionError("image-1 epipole is not the projected camera-2 center")
        if not proj_equal(self.e_prime_true, self.k2 @ self.t, 1e-9):
            raise AssertionError("image-2 epipole is not the projected camera-1 center")
        depth1 = self.points3d[:, 2]
        depth2 = (self.points3d @ self.r.T + self.t)[:, 2]
        if np.min(depth1) <= 0 or np.min(depth2) <= 0:
            raise AssertionError("non-positive depth in one of the cameras")

    def held_out_line1(self, index: int) -> np.ndarray:
        """True epipolar line in image 1 of the image-2 point at ``index``."""
        return self.f_true.m.T @ self.corr.pts2[index]

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "seed": int(self.seed),
            "image_size": [int(self.image_size[0]), int(self.image_size[1])],
            "K1": self.k1.tolist(),
            "K2": self.k2.tolist(),
            "R": self.r.tolist(),
            "t": self.t.tolist(),
            "points3d": self.points3d.tolist(),
            "points1": (self.corr.pts1[:, :2] / self.corr.pts1[:, 2:3]).tolist(),
            "points2": (self.corr.pts2[:, :2] / self.corr.pts2[:, 2:3]).tolist(),
            "F": self.f_true.flat(),
            "epipole1": [float(v) for v in display_hom(self.e_true)],
            "epipole2": [float(v) for v in display_hom(self.e_prime_true)],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def _project(k, r, t, x):
    cam = x @ r.T + t
    img = cam @ k.T
    return img / img[:, 2:3]


def _in_frame(px, size, margin=0.0):
    w, h = size
    return (
        (px[:, 0] >= margin)
        & (px[:, 0] <= w - margin)
        & (px[:, 1] >= margin)
        & (px[:, 1] <= h - margin)
    )


def _epipole_inside(e, size, margin):
    e = np.asarray(e, dtype=float)
    n = np.linalg.norm(e)
    if abs(e[2]) < 1e-9 * n:
        return False
    x, y = e[0] / e[2], e[1] / e[2]
    w, h = size
    return margin <= x <= w - margin and margin <= y <= h - margin


def _sample_points(rng, box, n, k, r2, t2, size, retries=1000):
    (x0, x1), (y0, y1), (z0, z1) = box
    out = []
    for _ in range(retries):
        batch = rng.uniform(
            [x0, y0, z0], [x1, y1, z1], size=(max(4 * n, 32), 3)
        )
        depth2 = batch @ r2.T[:, 2] + t2[2]
        ok = (batch[:, 2] > _MIN_DEPTH) & (depth2 > _MIN_DEPTH)
        px1 = batch @ k.T
        px1 = px1 / px1[:, 2:3]
        cam2 = batch @ r2.T + t2
        px2 = cam2 @ k.T
        with np.errstate(divide="ignore", invalid="ignore"):
            px2 = px2 / px2[:, 2:3]
        ok &= _in_frame(px1, size) & _in_frame(px2, size)
        out.extend(batch[ok])
        if len(out) >= n:
            return np.array(out[:n])
    raise GenerationFailureError(
        f"could not place {n} points in both frusta after {retries} retries"
    )


def generate_scene(
    mode: str = "facing",
    n_points: int = 12,
    image_size=(640, 480),
    seed: int = 0,
    focal: float = DEFAULT_FOCAL,
    jitter: float = 0.15,
) -> Scene:
    """Deterministic synthetic scene.

    facing: camera 2 sits on the +z axis turned half a revolution about y
    (plus pose jitter, rejection-sampled until both epipoles land inside
    the frame) - the configuration where each camera sees the other.
    lateral: a conventional side-by-side pair whose epipoles fall outside
    the frame.
    """
    if mode not in ("facing", "lateral"):
        raise ValueError(f"unknown mode {mode!r}")
    if n_points < 8:
        raise ValueError("n_points must be at least 8")
    w, h = image_size
    k = np.array(
        [[focal, 0.0, w / 2.0], [0.0, focal, h / 2.0], [0.0, 0.0, 1.0]]
    )
    rng = np.random.default_rng(seed)

    for _ in range(1000):
        if mode == "facing":
            dx, dy = rng.uniform(-jitter, jitter, size=2)
            tx, ty = rng.uniform(-2 * jitter, 2 * jitter, size=2)
            tz = rng.uniform(-2 * jitter, 2 * jitter)
            center2 = np.array([tx, ty, FACING_DISTANCE + tz])
            r2 = _rot_y(np.pi + dy) @ _rot_x(dx)
            box = FACING_BOX
            want_inside = True
        else:
            dx, dy = rng.uniform(-jitter, jitter, size=2)
            bx, by, bz = rng.uniform(-jitter, jitter, size=3)
            center2 = np.array([LATERAL_BASELINE + bx, by, bz])
            r2 = _rot_y(-0.12 + 0.5 * dy) @ _rot_x(0.3 * dx)
            box = LATERAL_BOX
            want_inside = False
        t2 = -r2 @ center2
        e1 = k @ center2
        e2 = k @ t2
        inside = _epipole_inside(e1, image_size, _EPIPOLE_MARGIN) and _epipole_inside(
            e2, image_size, _EPIPOLE_MARGIN
        )
        if inside == want_inside:
            break
    else:
        raise GenerationFailureError(
            "camera jitter rejection exhausted 1000 retries"
        )

    points3d = _sample_points(rng, box, n_points, k, r2, t2, image_size)
    px1 = _project(k, np.eye(3), np.zeros(3), points3d)
    px2 = _project(k, r2, t2, points3d)
    f_true = FundMatrix(
        np.linalg.inv(k).T @ _cross_matrix(t2) @ r2 @ np.linalg.inv(k)
    )
    scene = Scene(
        mode=mode,
        seed=seed,
        image_size=(w, h),
        k1=k,
        k2=k.copy(),
        r=r2,
        t=t2,
        points3d=points3d,
        corr=CorrSet(px1, px2),
        f_true=f_true,
        e_true=normalize_hom(e1),
        e_prime_true=normalize_hom(e2),
    )
    scene.validate()
    return scene


def scene_s1() -> Scene:
    """The repository's reference fixture: a jitter-free facing pair at
    distance 10, focal 800, 640x480, 12 points, seed 42. Both epipoles sit
    on the principal point."""
    return generate_scene(
        mode="facing",
        n_points=12,
        image_size=(640, 480),
        seed=42,
        focal=DEFAULT_FOCAL,
        jitter=0.0,
    )


def eight_point(corr: CorrSet) -> FundMatrix:
    """Normalized 8-point estimate: conditioned least squares, rank-2
    projection, transported back to pixels in canonical scale."""
    if len(corr) < 8:
        raise ValueError("need at least 8 correspondences")
    a = np.einsum("ni,nj->nij", corr.conditioned2, corr.conditioned1).reshape(-1, 9)
    sv = np.linalg.svd(a, compute_uv=False)
    if np.sum(sv > 1e-10 * sv[0]) < 8:
        raise DegenerateDataError(
            "correspondence design matrix has rank below 8", rank=int(np.sum(sv > 1e-10 * sv[0]))
        )
    _, _, vt = np.linalg.svd(a)
    f_n = vt[-1].reshape(3, 3)
    u, s, wt = np.linalg.svd(f_n)
    s = s.copy()
    s[2] = 0.0
    f_n = u @ np.diag(s) @ wt
    return FundMatrix(corr.t2.T @ f_n @ corr.t1)


def add_noise(corr: CorrSet, spec: NoiseSpec) -> CorrSet:
    """IID Gaussian pixel noise on both images (and on the stored epipole
    when requested). sigma = 0 returns an identical copy."""
    rng = np.random.default_rng(spec.seed)
    pts1 = corr.pts1 / corr.pts1[:, 2:3]
    pts2 = corr.pts2 / corr.pts2[:, 2:3]
    noise = rng.normal(0.0, 1.0, size=(len(corr), 4)) * spec.sigma
    pts1 = pts1 + np.hstack([noise[:, 0:2], np.zeros((len(corr), 1))])
    pts2 = pts2 + np.hstack([noise[:, 2:4], np.zeros((len(corr), 1))])
    epipole1 = corr.epipole1
    if spec.perturb_epipole and epipole1 is not None:
        e = as_hom(epipole1)
        if abs(e[2]) > 1e-9 * np.linalg.norm(e):
            e = e / e[2]
            e[:2] += rng.normal(0.0, 1.0, size=2) * spec.sigma
        epipole1 = e
    return CorrSet(pts1, pts2, epipole1=epipole1, epiline1=corr.epiline1)


def _pixel_distance(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if abs(a[2]) < 1e-12 * np.linalg.norm(a) or abs(b[2]) < 1e-12 * np.linalg.norm(b):
        return float("inf")
    return float(np.hypot(a[0] / a[2] - b[0] / b[2], a[1] / a[2] - b[1] / b[2]))


def _line_anchors(line, image_size):
    """Two deterministic anchor points on a pixel-frame line."""
    line = np.asarray(line, dtype=float)
    w, h = image_size
    cx, cy = w / 2.0, h / 2.0
    n2 = line[0] ** 2 + line[1] ** 2
    if n2 < 1e-300:
        raise DegenerateDataError("line with vanishing direction part")
    s = (line[0] * cx + line[1] * cy + line[2]) / n2
    foot = np.array([cx - s * line[0], cy - s * line[1]])
    d = np.array([-line[1], line[0]]) / np.sqrt(n2)
    a = np.array([*(foot - 0.5 * w * d), 1.0])
    b = np.array([*(foot + 0.5 * w * d), 1.0])
    return a, b


def bench_noise(
    method: str,
    sigmas,
    trials: int,
    seed: int = 0,
    mode: str = "facing",
    n_points: int = 12,
    image_size=(640, 480),
) -> list:
    """Noise sweep for one solver; per sigma reports median / 90th-percentile
    pixel error against the true image-2 epipole and the failure rate.

    solve4 measures the pixel distance from the true epipole to the nearest
    sampled point of the returned conic; solve5/solve6 measure the error of
    the estimated epipole itself. Trials use derived seeds (seed + trial),
    so the resulting table is reproducible.
    """
    from . import solvers
    from .errors import GeometryError

    if method not in ("solve4", "solve5", "solve6"):
        raise ValueError(f"unknown method {method!r}")
    w, h = image_size
    rows = []
    for si, sigma in enumerate(sigmas):
        errors = []
        fails = 0
        for trial in range(trials):
            scene = generate_scene(
                mode=mode, n_points=n_points, image_size=image_size, seed=seed + trial
            )
            noisy = add_noise(
                scene.corr,
                NoiseSpec(float(sigma), seed=(seed + trial) * 1000003 + si),
            )
            try:
                if method == "solve4":
                    locus = solvers.solve_four(
                        scene.e_true,
                        noisy.subset(range(4)),
                        viewport=(-w, -h, 2 * w, 2 * h),
                        n_samples=1024,
                    )
                    target = display_hom(scene.e_prime_true)
                    best = float("inf")
                    for branch in locus.branches:
                        if len(branch):
                            d = np.hypot(
                                branch[:, 0] - target[0], branch[:, 1] - target[1]
                            )
                            best = min(best, float(np.min(d)))
                    if not np.isfinite(best):
                        raise GeometryError("conic has no real sample near the image")
                    errors.append(best)
                elif method == "solve5":
                    est = solvers.solve_five(scene.e_true, noisy.subset(range(5)))
                    errors.append(_pixel_distance(est.e_prime, scene.e_prime_true))
                else:
                    line = scene.held_out_line1(6)
                    a, b = _line_anchors(line, image_size)
                    lp = solvers.LineParam(line=line, anchor_a=a, anchor_b=b)
                    roots = solvers.solve_six(lp, noisy.subset(range(6)))
                    errors.append(
                        _pixel_distance(roots[0].e_prime, scene.e_prime_true)
                    )
            except GeometryError:
                fails += 1
        finite = [e for e in errors if np.isfinite(e)]
        rows.append(
            {
                "method": method,
                "sigma": float(sigma),
                "median_px": float(np.median(finite)) if finite else float("nan"),
                "p90_px": float(np.percentile(finite, 90)) if finite else float("nan"),
                "fail_rate": fails / trials if trials else 0.0,
                "errors": errors,
            }
        )
    return rows


def bench_csv(rows) -> str:
    lines = ["method,sigma,median_px,p90_px,fail_rate"]
    for r in rows:
        lines.append(
            f"{r['method']},{r['sigma']!r},{r['median_px']!r},"
            f"{r['p90_px']!r},{r['fail_rate']!r}"
        )
    return "\n".join(lines) + "\n"
