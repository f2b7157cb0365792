"""Epipole solvers for 4, 5, and 6 correspondences.

4 matches + the image-1 epipole constrain the image-2 epipole to a conic.
5 matches intersect two such conics; because the conics share three of
the correspondence points, mapping those to the coordinate triangle
turns each conic into a line under the reciprocal map (x,y,z)->(yz,zx,xy),
and the wanted fourth intersection is the reciprocal of the meet of the
two lines mapped back.
6 matches plus a known line carrying the image-1 epipole reduce to a 1-D
root search: slide the epipole along the line, solve the 5-point problem
on the first five matches, and find where the constraint of a subset
containing the sixth match vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .conic import Conic, conic_sample
from .constraints import conic_from_4corr, residual_rms
from .correspondences import CorrSet
from .errors import (
    CoincidentSolutionError,
    DegenerateInputError,
    GeometryError,
    IllConditionedConfigurationError,
    NoSolutionError,
    UnderdeterminedError,
)
from .projective import (
    display_hom,
    homography_to_standard_triangle,
    normalize_hom,
    proj_equal,
    reciprocal,
)

_SQUARE_COEFF_TOL = 1e-8
_LINE_PARALLEL_TOL = 1e-10
_VERTEX_COORD_TOL = 1e-12

SIX_GRID_DEFAULT = 2048
SIX_BISECT_TOL = 1e-12


@dataclass(frozen=True)
class EpipoleEstimate:
    """A located image-2 epipole with its scale-free constraint residual."""

    e_prime: np.ndarray
    residual_rms: float
    method: str
    alternates: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "epipole": [float(v) for v in self.e_prime],
            "residual_rms": float(self.residual_rms),
            "method": self.method,
            "alternates": [[float(v) for v in a] for a in self.alternates],
        }


@dataclass(frozen=True)
class ConicLocus:
    """Output of the 4-point solver: the conic carrying the epipole."""

    conic: Conic
    classification: str
    branches: list

    @property
    def method(self) -> str:
        return "four_conic"


@dataclass(frozen=True)
class SixSolution:
    """One epipole pair found by the 6-point line search."""

    e: np.ndarray
    e_prime: np.ndarray
    residual_rms: float

    def __iter__(self):
        return iter((self.e, self.e_prime))


@dataclass(frozen=True)
class LineParam:
    """A line in image 1 known to carry the epipole, with two anchor points
    parametrizing it."""

    line: np.ndarray
    anchor_a: np.ndarray
    anchor_b: np.ndarray

    def __post_init__(self):
        line = normalize_hom(self.line)
        object.__setattr__(self, "line", line)
        for name in ("anchor_a", "anchor_b"):
            p = normalize_hom(getattr(self, name))
            if abs(float(line @ p)) >= 1e-9:
                raise DegenerateInputError(f"{name} does not lie on the line")
            object.__setattr__(self, name, p)
        if proj_equal(self.anchor_a, self.anchor_b, 1e-12):
            raise DegenerateInputError("anchors must be distinct points")

    @classmethod
    def from_line(cls, line, image_size=(640, 480)) -> "LineParam":
        """Anchors centered on the image: the foot of the perpendicular from
        the image center, offset both ways along the line's direction."""
        line = np.asarray(line, dtype=float)
        w, h = image_size
        n2 = line[0] ** 2 + line[1] ** 2
        if n2 < 1e-300:
            raise DegenerateInputError("line with vanishing direction part")
        cx, cy = w / 2.0, h / 2.0
        s = (line[0] * cx + line[1] * cy + line[2]) / n2
        foot = np.array([cx - s * line[0], cy - s * line[1]])
        d = np.array([-line[1], line[0]]) / np.sqrt(n2)
        a = np.array([*(foot - 0.5 * w * d), 1.0])
        b = np.array([*(foot + 0.5 * w * d), 1.0])
        return cls(line=line, anchor_a=a, anchor_b=b)


def solve_four(e, corr: CorrSet, viewport=None, n_samples: int = 256) -> ConicLocus:
    """4 correspondences + image-1 epipole: the conic in image 2 on which
    the other epipole lies, classified and sampled for display."""
    if len(corr) != 4:
        raise ValueError("solve_four needs exactly 4 correspondences")
    conic = conic_from_4corr(e, (0, 1, 2, 3), corr, frame="pixel")
    # rank is only meaningful on scale-free coefficients, so the
    # degeneracy gate runs in the conditioned frame
    classification = conic_from_4corr(e, (0, 1, 2, 3), corr, frame="normalized").classify()
    branches = []
    if classification == "nondegenerate":
        if viewport is None:
            viewport = _default_viewport(corr)
        branches = conic_sample(
            conic, viewport, n=n_samples, seed_point=corr.pts2[0]
        )
    return ConicLocus(conic=conic, classification=classification, branches=branches)


def _default_viewport(corr: CorrSet):
    xy = corr.pts2[:, :2] / corr.pts2[:, 2:3]
    lo = xy.min(axis=0)
    hi = xy.max(axis=0)
    span = np.maximum(hi - lo, 1.0)
    return (
        float(lo[0] - 2 * span[0]),
        float(lo[1] - 2 * span[1]),
        float(hi[0] + 2 * span[0]),
        float(hi[1] + 2 * span[1]),
    )


def _conic_matrix_conditioned(e_n, quad, corr: CorrSet) -> np.ndarray:
    """Raw conditioned-frame conic matrix of one 4-subset (no canonical scale)."""
    pts1n = corr.conditioned1
    pts2n = corr.conditioned2
    i, j, k, l = quad
    alpha = float(e_n @ np.cross(pts1n[i], pts1n[j])) * float(
        e_n @ np.cross(pts1n[k], pts1n[l])
    )
    beta = float(e_n @ np.cross(pts1n[i], pts1n[k])) * float(
        e_n @ np.cross(pts1n[j], pts1n[l])
    )
    m1 = _sym_outer(
        np.cross(pts2n[i], pts2n[k]), np.cross(pts2n[j], pts2n[l])
    )
    m2 = _sym_outer(
        np.cross(pts2n[i], pts2n[j]), np.cross(pts2n[k], pts2n[l])
    )
    return alpha * m1 - beta * m2


def _sym_outer(u, v) -> np.ndarray:
    return 0.5 * (np.outer(u, v) + np.outer(v, u))


def _split_candidates(n: int):
    """Shared-triple splits of a 5-set, primary split first."""
    out = []
    for shared in combinations(range(n), 3):
        extras = tuple(i for i in range(n) if i not in shared)
        out.append((shared, extras))
    return out


def _solve_five_split(e, corr: CorrSet, shared, extras) -> EpipoleEstimate:
    s1, s2, s3 = shared
    r1, r2 = extras
    pts2n = corr.conditioned2
    e_n = corr.condition_point1(e)

    h = homography_to_standard_triangle(pts2n[s1], pts2n[s2], pts2n[s3], pts2n[r1])
    h_inv = np.linalg.inv(h)

    lines = []
    for extra in (r1, r2):
        quad = tuple(sorted(shared + (extra,)))
        c_t = h_inv.T @ _conic_matrix_conditioned(e_n, quad, corr) @ h_inv
        scale = np.max(np.abs(Conic(c_t).coefficients()))
        if scale == 0.0 or not np.isfinite(scale):
            raise UnderdeterminedError("conic collapsed while transporting")
        square = max(abs(c_t[0, 0]), abs(c_t[1, 1]), abs(c_t[2, 2])) / scale
        if square >= _SQUARE_COEFF_TOL:
            raise IllConditionedConfigurationError(
                f"triangle-frame conic kept square terms ({square:.3g}); "
                "shared points are not cleanly on the conic",
                square=square,
            )
        # a conic through the triangle vertices is b*xy + d*xz + e*yz = 0;
        # the reciprocal map sends its points onto the line (e, d, b)
        line = np.array([c_t[1, 2], c_t[0, 2], c_t[0, 1]])
        lines.append(line / np.linalg.norm(line))

    cross = np.cross(lines[0], lines[1])
    if np.linalg.norm(cross) < _LINE_PARALLEL_TOL:
        raise UnderdeterminedError(
            "the two constraint conics coincide; epipole is underdetermined"
        )
    m = cross / np.linalg.norm(cross)
    n_small = int(np.sum(np.abs(m) < _VERTEX_COORD_TOL))
    if n_small >= 2:
        raise CoincidentSolutionError(
            "meet of the reciprocal lines is a triangle vertex: the fourth "
            "intersection collides with a shared point; try a different quad split"
        )
    if n_small == 1:
        raise CoincidentSolutionError(
            "fourth intersection coincides with one of the shared points; "
            "try a different quad split"
        )
    e_prime_cond = h_inv @ reciprocal(m)
    e_prime = display_hom(corr.t2_inv @ e_prime_cond)
    rms = residual_rms(e, e_prime, corr)
    return EpipoleEstimate(
        e_prime=e_prime, residual_rms=rms, method="five_cremona", alternates=[]
    )


def solve_five(e, corr: CorrSet) -> EpipoleEstimate:
    """5 correspondences + image-1 epipole: the image-2 epipole itself.

    The primary split keeps matches {1,2,3} shared between the two
    4-subsets with the fourth match as the homography's unit point; on a
    degenerate split the solver retries the nine other shared triples
    before giving up.
    """
    if len(corr) != 5:
        raise ValueError("solve_five needs exactly 5 correspondences")
    last_err = None
    for shared, extras in _split_candidates(5):
        try:
            return _solve_five_split(e, corr, shared, extras)
        except GeometryError as err:
            last_err = err
    raise last_err


def rank_candidates(
    cands, e, corr: CorrSet, method: str = "five_cremona"
) -> EpipoleEstimate:
    """Pick the candidate minimizing the all-subset residual RMS.

    Ties within 1e-12 go to the lower index, so the choice is deterministic.
    """
    cands = [np.asarray(c, dtype=float) for c in cands]
    if not cands:
        raise ValueError("empty candidate list")
    scores = [residual_rms(e, c, corr) for c in cands]
    best = 0
    for i in range(1, len(cands)):
        if scores[i] < scores[best] - 1e-12:
            best = i
    alternates = [display_hom(c) for i, c in enumerate(cands) if i != best]
    return EpipoleEstimate(
        e_prime=display_hom(cands[best]),
        residual_rms=scores[best],
        method=method,
        alternates=alternates,
    )


class _LineScan:
    """Vectorized evaluation of the 5-point construction along a line of
    image-1 epipole candidates, plus the extra-subset residual g(t) whose
    roots are the 6-point solutions.

    Everything runs in the conditioned frame of the full 6-match set; the
    construction is projective, so the result agrees with solve_five run
    in its own frame.
    """

    G_QUAD = (1, 2, 3, 5)

    def __init__(self, lp: LineParam, corr: CorrSet):
        if len(corr) != 6:
            raise ValueError("the line scan needs exactly 6 correspondences")
        self.corr = corr
        pts1n = corr.conditioned1
        pts2n = corr.conditioned2
        self.a_n = corr.condition_point1(lp.anchor_a)
        self.b_n = corr.condition_point1(lp.anchor_b)
        if np.linalg.norm(np.cross(self.a_n, self.b_n)) < 1e-12:
            raise DegenerateInputError("anchors coincide after conditioning")

        last_err = None
        for shared, extras in _split_candidates(5):
            try:
                self.h = homography_to_standard_triangle(
                    pts2n[shared[0]], pts2n[shared[1]], pts2n[shared[2]],
                    pts2n[extras[0]],
                )
                self.shared, self.extras = shared, extras
                break
            except GeometryError as err:
                last_err = err
        else:
            raise last_err
        self.h_inv = np.linalg.inv(self.h)

        def quad_terms(quad, transported):
            i, j, k, l = quad
            h_pairs = np.stack(
                [
                    np.cross(pts1n[i], pts1n[j]),
                    np.cross(pts1n[k], pts1n[l]),
                    np.cross(pts1n[i], pts1n[k]),
                    np.cross(pts1n[j], pts1n[l]),
                ]
            )
            m1 = _sym_outer(np.cross(pts2n[i], pts2n[k]), np.cross(pts2n[j], pts2n[l]))
            m2 = _sym_outer(np.cross(pts2n[i], pts2n[j]), np.cross(pts2n[k], pts2n[l]))
            if transported:
                m1 = self.h_inv.T @ m1 @ self.h_inv
                m2 = self.h_inv.T @ m2 @ self.h_inv
            return h_pairs, m1, m2

        quad_a = tuple(sorted(self.shared + (self.extras[0],)))
        quad_b = tuple(sorted(self.shared + (self.extras[1],)))
        self.ha, m1a, m2a = quad_terms(quad_a, True)
        self.hb, m1b, m2b = quad_terms(quad_b, True)
        # only the off-diagonal entries survive for conics through the
        # triangle vertices, so each transported form contributes a line
        self.la1 = np.array([m1a[1, 2], m1a[0, 2], m1a[0, 1]])
        self.la2 = np.array([m2a[1, 2], m2a[0, 2], m2a[0, 1]])
        self.lb1 = np.array([m1b[1, 2], m1b[0, 2], m1b[0, 1]])
        self.lb2 = np.array([m2b[1, 2], m2b[0, 2], m2b[0, 1]])
        self.hg, self.m1g, self.m2g = quad_terms(self.G_QUAD, False)

    def epipole1_at(self, t):
        """Conditioned image-1 epipole samples for parameter values t."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        e = self.a_n[None, :] + t[:, None] * self.b_n[None, :]
        return e

    def evaluate(self, t):
        """g(t), validity mask, and the conditioned image-2 epipole rows."""
        e = self.epipole1_at(t)
        en = np.linalg.norm(e, axis=1)
        valid = en > 1e-12
        e = e / np.where(valid, en, 1.0)[:, None]

        da = (e @ self.ha.T)  # (n,4) image-1 brackets of subset A
        db = (e @ self.hb.T)
        alpha_a = da[:, 0] * da[:, 1]
        beta_a = da[:, 2] * da[:, 3]
        alpha_b = db[:, 0] * db[:, 1]
        beta_b = db[:, 2] * db[:, 3]

        la = alpha_a[:, None] * self.la1[None, :] - beta_a[:, None] * self.la2[None, :]
        lb = alpha_b[:, None] * self.lb1[None, :] - beta_b[:, None] * self.lb2[None, :]
        lan = np.linalg.norm(la, axis=1)
        lbn = np.linalg.norm(lb, axis=1)
        valid &= (lan > 1e-300) & (lbn > 1e-300)
        la = la / np.where(valid, lan, 1.0)[:, None]
        lb = lb / np.where(valid, lbn, 1.0)[:, None]

        m = np.cross(la, lb)
        mn = np.linalg.norm(m, axis=1)
        valid &= mn > _LINE_PARALLEL_TOL
        m = m / np.where(valid, mn, 1.0)[:, None]

        rec = np.stack([m[:, 1] * m[:, 2], m[:, 2] * m[:, 0], m[:, 0] * m[:, 1]], axis=1)
        recn = np.linalg.norm(rec, axis=1)
        valid &= recn > _VERTEX_COORD_TOL
        ep = rec @ self.h_inv.T
        epn = np.linalg.norm(ep, axis=1)
        valid &= epn > 1e-300
        ep = ep / np.where(valid, epn, 1.0)[:, None]

        dg = e @ self.hg.T
        q1 = np.einsum("ni,ij,nj->n", ep, self.m1g, ep)
        q2 = np.einsum("ni,ij,nj->n", ep, self.m2g, ep)
        g = dg[:, 0] * dg[:, 1] * q1 - dg[:, 2] * dg[:, 3] * q2
        valid &= np.isfinite(g)
        return g, valid, ep

    def refine(self, t_lo, t_hi, g_lo, tol=SIX_BISECT_TOL):
        """Bisection on a sign-change bracket; returns t or None when the
        bracket collapses onto a degenerate sample."""
        for _ in range(200):
            if abs(t_hi - t_lo) < tol:
                break
            mid = 0.5 * (t_lo + t_hi)
            g, valid, _ = self.evaluate(np.array([mid]))
            if not valid[0]:
                mid += 1e-13 * max(1.0, abs(t_hi - t_lo))
                g, valid, _ = self.evaluate(np.array([mid]))
                if not valid[0]:
                    return None
            if g[0] == 0.0:
                return mid
            if np.sign(g[0]) == np.sign(g_lo):
                t_lo = mid
            else:
                t_hi = mid
        return 0.5 * (t_lo + t_hi)


def solve_six(
    lp: LineParam,
    corr: CorrSet,
    grid: int = SIX_GRID_DEFAULT,
    bisect_tol: float = SIX_BISECT_TOL,
) -> list:
    """6 correspondences + a line carrying the image-1 epipole: both epipoles.

    The line is covered by two affine charts (anchor_a + t*anchor_b and
    anchor_b + t*anchor_a, t in [-1, 1]), scanned on a uniform grid; sign
    changes of the extra-subset residual between valid neighbouring samples
    are refined by bisection. Degenerate samples are treated as missing,
    never interpolated across. Solutions are deduplicated, cross-checked
    against all 4-subsets, ranked by residual RMS, and capped at the three
    roots the underlying cubic admits.
    """
    if len(corr) != 6:
        raise ValueError("solve_six needs exactly 6 correspondences")

    charts = [
        _LineScan(lp, corr),
        _LineScan(
            LineParam(line=lp.line, anchor_a=lp.anchor_b, anchor_b=lp.anchor_a), corr
        ),
    ]
    ts = np.linspace(-1.0, 1.0, max(int(grid), 2))

    roots = []
    min_abs_g = np.inf
    for scan in charts:
        g, valid, _ = scan.evaluate(ts)
        if np.any(valid):
            min_abs_g = min(min_abs_g, float(np.min(np.abs(g[valid]))))
        for i in range(len(ts) - 1):
            if not (valid[i] and valid[i + 1]):
                continue
            if g[i] == 0.0:
                roots.append((scan, ts[i]))
                continue
            if g[i] * g[i + 1] < 0.0:
                t_star = scan.refine(ts[i], ts[i + 1], g[i], tol=bisect_tol)
                if t_star is not None:
                    roots.append((scan, t_star))
        if valid[-1] and g[-1] == 0.0:
            roots.append((scan, ts[-1]))

    solutions = []
    for scan, t_star in roots:
        _, valid, ep = scan.evaluate(np.array([t_star]))
        if not valid[0]:
            continue
        e_n = normalize_hom(scan.epipole1_at(np.array([t_star]))[0])
        e_px = corr.t1_inv @ e_n
        ep_px = corr.t2_inv @ ep[0]
        # a "solution" that lands on one of the marked image-2 points is an
        # artifact of the constraint vanishing there, not an epipole
        if any(proj_equal(ep[0], q, 1e-8) for q in corr.conditioned2):
            continue
        if any(proj_equal(e_px, s.e, 1e-6) for s in solutions):
            continue
        rms = residual_rms(e_px, ep_px, corr)
        solutions.append(
            SixSolution(
                e=display_hom(e_px), e_prime=display_hom(ep_px), residual_rms=rms
            )
        )

    if not solutions:
        raise NoSolutionError(
            "no sign change of the six-point constraint along the line",
            min_abs_residual=None if not np.isfinite(min_abs_g) else min_abs_g,
        )
    solutions.sort(key=lambda s: s.residual_rms)
    keep = [
        s
        for s in solutions
        if s.residual_rms <= max(1e3 * solutions[0].residual_rms, 1e-8)
    ]
    return keep[:3]
