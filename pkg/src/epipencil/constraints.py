"""The bracket constraint tying corresponding points to the two epipoles.

For four matches (i, j, k, l) with epipoles e, e' the pencils of lines
through the epipoles have equal cross-ratios, which after clearing
denominators reads

    |e p_i p_j| |e p_k p_l| |e' p'_i p'_k| |e' p'_j p'_l|
  = |e' p'_i p'_j| |e' p'_k p'_l| |e p_i p_k| |e p_j p_l|

with |abc| the 3x3 determinant. With e fixed, the residual of this
identity is a quadratic form in e': a conic in image 2 through e' and
through all four p'_s.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .conic import Conic
from .correspondences import CorrSet
from .errors import RedundantConfigurationError
from .projective import COLLINEAR_TOL

_PROBES = np.array(
    [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [1.0, 1.0, 0.0],
        [1.0, 0.0, 1.0],
        [0.0, 1.0, 1.0],
    ]
)


def canonical_quad(quad, n: int) -> tuple:
    """Validate and sort a 4-tuple of distinct correspondence indices."""
    q = tuple(int(i) for i in quad)
    if len(q) != 4 or len(set(q)) != 4:
        raise ValueError(f"quad must hold 4 distinct indices, got {quad}")
    if not all(0 <= i < n for i in q):
        raise ValueError(f"quad {quad} out of range for {n} correspondences")
    return tuple(sorted(q))


def all_quads(n: int):
    """All canonical 4-subsets of range(n)."""
    return list(combinations(range(n), 4))


def quad_orderings(quad):
    """The three inequivalent argument orders of a 4-subset.

    Each order pairs the four indices differently, giving three distinct
    constraint equations; at a true epipole pair all three vanish together.
    """
    i, j, k, l = quad
    return [(i, j, k, l), (i, j, l, k), (i, k, l, j)]


def _known_side_brackets(e_n, pts1n, quad, check: bool, tol: float):
    """The four image-1 brackets of the constraint, with degeneracy gate."""
    i, j, k, l = quad
    pairs = ((i, j), (k, l), (i, k), (j, l))
    vals = []
    for a, b in pairs:
        h = np.cross(pts1n[a], pts1n[b])
        hn = np.linalg.norm(h)
        if check and (hn < 1e-12 or abs(float(e_n @ h)) < tol * hn):
            raise RedundantConfigurationError(
                f"image-1 points {a} and {b} are collinear with the epipole",
                triple=[a, b, "epipole1"],
            )
        vals.append(float(e_n @ h))
    return vals


def _prime_side_form(z, pts2n, quad):
    """Both image-2 bracket products of the constraint at probe z."""
    i, j, k, l = quad
    q1 = float(z @ np.cross(pts2n[i], pts2n[k])) * float(z @ np.cross(pts2n[j], pts2n[l]))
    q2 = float(z @ np.cross(pts2n[i], pts2n[j])) * float(z @ np.cross(pts2n[k], pts2n[l]))
    return q1, q2


def constraint_residual(
    e,
    e_prime,
    quad,
    corr: CorrSet,
    *,
    ordering=None,
    check: bool = True,
    collinear_tol: float = COLLINEAR_TOL,
) -> float:
    """Residual of the bracket constraint at a candidate epipole pair.

    Computed on conditioned, unit-normalized coordinates so the magnitude
    is scale-free; zero (to roundoff) at a true epipole pair. ``ordering``
    overrides the canonical sorted pairing with one of ``quad_orderings``.
    """
    quad = canonical_quad(quad, len(corr)) if ordering is None else tuple(ordering)
    e_n = corr.condition_point1(e)
    ep_n = corr.condition_point2(e_prime)
    d_ij, d_kl, d_ik, d_jl = _known_side_brackets(
        e_n, corr.conditioned1, quad, check, collinear_tol
    )
    q1, q2 = _prime_side_form(ep_n, corr.conditioned2, quad)
    return d_ij * d_kl * q1 - d_ik * d_jl * q2


def residual_rms(e, e_prime, corr: CorrSet, quads=None) -> float:
    """RMS of the constraint residual over 4-subsets (all of them by default)."""
    if quads is None:
        quads = all_quads(len(corr))
    vals = [
        constraint_residual(e, e_prime, q, corr, check=False) for q in quads
    ]
    return float(np.sqrt(np.mean(np.square(vals))))


def conic_from_4corr(
    e,
    quad,
    corr: CorrSet,
    *,
    frame: str = "pixel",
    collinear_tol: float = COLLINEAR_TOL,
) -> Conic:
    """The conic in image 2 carrying the unknown epipole, from one 4-subset.

    The residual, seen as a function of e', is a quadratic form; its six
    coefficients are read off by evaluating at six probe points rather
    than by hand-expanded formulas. The conic passes through all four
    image-2 points of the subset and through the true e'.

    frame="pixel" transports the conic back to pixel coordinates (the
    serialization frame); frame="normalized" keeps the conditioned frame
    used for scale-free incidence tests.
    """
    if frame not in ("pixel", "normalized"):
        raise ValueError(f"unknown frame {frame!r}")
    quad = canonical_quad(quad, len(corr))
    e_n = corr.condition_point1(e)
    pts1n = corr.conditioned1
    pts2n = corr.conditioned2

    for a, b in combinations(quad, 2):
        h = np.cross(pts1n[a], pts1n[b])
        hn = np.linalg.norm(h)
        if hn < 1e-12 or abs(float(e_n @ h)) < collinear_tol * hn:
            raise RedundantConfigurationError(
                f"image-1 points {a} and {b} are collinear with the epipole",
                triple=[a, b, "epipole1"],
            )

    d_ij, d_kl, d_ik, d_jl = _known_side_brackets(
        e_n, pts1n, quad, False, collinear_tol
    )
    alpha = d_ij * d_kl
    beta = d_ik * d_jl

    def form(z):
        q1, q2 = _prime_side_form(z, pts2n, quad)
        return alpha * q1 - beta * q2

    r = [form(z) for z in _PROBES]
    a, c, f = r[0], r[1], r[2]
    b = r[3] - a - c
    d = r[4] - a - f
    e_coef = r[5] - c - f
    conic_n = Conic.from_coefficients(a, b, c, d, e_coef, f)
    if frame == "normalized":
        return conic_n.canonical()
    t2 = corr.t2
    return Conic(t2.T @ conic_n.sym @ t2).canonical()
