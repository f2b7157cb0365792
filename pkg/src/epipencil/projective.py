"""Projective algebra in the plane.

Points and lines are both represented by homogeneous coordinate triples
(plain float ndarrays of shape (3,)); which role a triple plays is
decided by the operation. Pixel coordinates embed as (px, py, 1).

All functions are pure. ``det2`` / ``det3`` broadcast over leading axes
so the solvers can evaluate them on whole sample grids at once.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DegenerateInputError,
    DegeneratePencilError,
    IllConditionedConfigurationError,
)

# Absolute tolerance for projective equality of unit-normalized triples.
PROJ_TOL = 1e-9
# |det3| of unit-normalized triples below this counts as collinear.
COLLINEAR_TOL = 1e-8
# Coordinates below this fraction of the triple's norm count as zero.
ZERO_COORD_TOL = 1e-12


def hom(x, y, z=1.0) -> np.ndarray:
    """Build a homogeneous triple from explicit coordinates."""
    return np.array([x, y, z], dtype=float)


def as_hom(v) -> np.ndarray:
    """Coerce a 2-vector (pixel point) or 3-vector to a homogeneous triple."""
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.size == 2:
        return np.array([a[0], a[1], 1.0])
    if a.size == 3:
        return a.astype(float, copy=True)
    raise ValueError(f"expected a 2- or 3-vector, got shape {np.shape(v)}")


def normalize_hom(v) -> np.ndarray:
    """Canonical representative: unit norm, first non-negligible coordinate positive."""
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if n == 0.0 or not np.isfinite(n):
        raise DegenerateInputError("zero or non-finite homogeneous triple")
    u = v / n
    for c in u:
        if abs(c) > ZERO_COORD_TOL:
            if c < 0.0:
                u = -u
            break
    return u


def display_hom(v) -> np.ndarray:
    """Representative for output: z scaled to 1 when safely finite, else unit norm."""
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise DegenerateInputError("zero homogeneous triple")
    if abs(v[2]) > 1e-9 * n:
        return v / v[2]
    return normalize_hom(v)


def proj_equal(u, v, tol: float = PROJ_TOL) -> bool:
    """Projective equality of two triples (scale- and sign-insensitive)."""
    a = normalize_hom(u)
    b = normalize_hom(v)
    d = min(np.max(np.abs(a - b)), np.max(np.abs(a + b)))
    return bool(d <= tol)


def det2(a, b):
    """Determinant of the 2x2 matrix formed by the x,y components of a and b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def det3(a, b, c):
    """Signed determinant of the 3x3 matrix with columns a, b, c.

    Zero iff the three points are collinear (dually: three concurrent lines).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    return (
        a[..., 0] * (b[..., 1] * c[..., 2] - b[..., 2] * c[..., 1])
        + a[..., 1] * (b[..., 2] * c[..., 0] - b[..., 0] * c[..., 2])
        + a[..., 2] * (b[..., 0] * c[..., 1] - b[..., 1] * c[..., 0])
    )


def _checked_cross(p, q, kind: str) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    r = np.cross(p, q)
    if np.linalg.norm(r) <= ZERO_COORD_TOL * np.linalg.norm(p) * np.linalg.norm(q):
        raise DegenerateInputError(f"{kind} of projectively equal arguments")
    return r


def join(p, q) -> np.ndarray:
    """Line through two distinct points."""
    return _checked_cross(p, q, "join")


def meet(l, m) -> np.ndarray:
    """Intersection point of two distinct lines."""
    return _checked_cross(l, m, "meet")


def cross_ratio_lines(l1, l2, l3, l4) -> float:
    """Cross-ratio of four concurrent lines via 2x2 brackets of (a, b) parts.

    Uses only the first two line coefficients, so a pencil containing the
    line (0, 0, 1) (equivalently: a pencil through an ideal vertex) is
    outside this function's domain and raises.
    """
    ls = [np.asarray(l, dtype=float) for l in (l1, l2, l3, l4)]
    xy = [np.linalg.norm(l[:2]) for l in ls]

    def d(i, j):
        return det2(ls[i], ls[j])

    for i, j in ((0, 2), (1, 3)):
        if abs(d(i, j)) <= ZERO_COORD_TOL * max(xy[i] * xy[j], 1e-300):
            raise DegeneratePencilError(
                f"coincident pencil members {i + 1} and {j + 1}"
            )
    return float((d(0, 1) * d(2, 3)) / (d(0, 2) * d(1, 3)))


def reciprocal(p) -> np.ndarray:
    """Quadratic involution (x, y, z) -> (yz, zx, xy).

    Undefined on the vertices of the coordinate triangle (two zero
    coordinates), where the image would be the zero triple.
    """
    p = np.asarray(p, dtype=float)
    n = float(np.linalg.norm(p))
    if n == 0.0:
        raise DegenerateInputError("zero homogeneous triple")
    if int(np.sum(np.abs(p) <= ZERO_COORD_TOL * n)) >= 2:
        raise DegenerateInputError(
            "reciprocal undefined on coordinate-triangle vertices"
        )
    return np.array([p[1] * p[2], p[2] * p[0], p[0] * p[1]])


def homography_to_standard_triangle(q1, q2, q3, q4) -> np.ndarray:
    """Homography sending q1..q4 to (1,0,0), (0,1,0), (0,0,1), (1,1,1).

    The four points must be in general position; the offending triple is
    reported when any three are (near-)collinear.
    """
    qs = [normalize_hom(q) for q in (q1, q2, q3, q4)]
    for idx in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
        if abs(det3(qs[idx[0]], qs[idx[1]], qs[idx[2]])) < COLLINEAR_TOL:
            raise IllConditionedConfigurationError(
                f"points {idx} are (near-)collinear", triple=list(idx)
            )
    m = np.column_stack(qs[:3])
    lam = np.linalg.solve(m, qs[3])
    h_inv = m * lam  # columns lam_i * q_i: maps basis triangle back onto the quad
    return np.linalg.inv(h_inv)


def require_invertible(h, tol: float = 1e-12) -> np.ndarray:
    """Validate a 3x3 homography matrix: |det| bounded away from zero after
    row-norm scaling."""
    h = np.asarray(h, dtype=float)
    if h.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got {h.shape}")
    rn = np.linalg.norm(h, axis=1)
    if np.any(rn == 0.0) or not np.all(np.isfinite(rn)):
        raise DegenerateInputError("singular homography (zero or non-finite row)")
    if abs(np.linalg.det(h / rn[:, None])) <= tol:
        raise DegenerateInputError("singular homography")
    return h
