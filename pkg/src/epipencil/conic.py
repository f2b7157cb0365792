"""Plane conics as symmetric 3x3 coefficient matrices.

Coefficient order follows the quadratic a*x^2 + b*xy + c*y^2 + d*xz +
e*yz + f*z^2, i.e. sym = [[a, b/2, d/2], [b/2, c, e/2], [d/2, e/2, f]].
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateInputError
from .projective import normalize_hom, require_invertible

_COEFF_ZERO_TOL = 1e-12


class Conic:
    """Immutable conic; compares and serializes through its canonical scale."""

    __slots__ = ("sym",)

    def __init__(self, sym):
        sym = np.asarray(sym, dtype=float)
        if sym.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got {sym.shape}")
        sym = 0.5 * (sym + sym.T)
        if not np.all(np.isfinite(sym)) or np.max(np.abs(sym)) == 0.0:
            raise DegenerateInputError("zero or non-finite conic matrix")
        object.__setattr__(self, "sym", sym)

    def __setattr__(self, *_):
        raise AttributeError("Conic is immutable")

    @classmethod
    def from_coefficients(cls, a, b, c, d, e, f) -> "Conic":
        return cls(
            np.array(
                [
                    [a, b / 2.0, d / 2.0],
                    [b / 2.0, c, e / 2.0],
                    [d / 2.0, e / 2.0, f],
                ]
            )
        )

    def coefficients(self) -> np.ndarray:
        """Coefficients (a, b, c, d, e, f) of the stored matrix."""
        s = self.sym
        return np.array(
            [s[0, 0], 2 * s[0, 1], s[1, 1], 2 * s[0, 2], 2 * s[1, 2], s[2, 2]]
        )

    def canonical(self) -> "Conic":
        """Rescale so max |coefficient| is 1 and the first nonzero one is positive."""
        co = self.coefficients()
        scale = np.max(np.abs(co))
        co = co / scale
        for c in co:
            if abs(c) > _COEFF_ZERO_TOL:
                if c < 0.0:
                    co = -co
                break
        return Conic.from_coefficients(*co)

    def evaluate(self, p) -> float:
        """Incidence residual p^T sym p on the unit-normalized representative of p."""
        u = normalize_hom(p)
        return float(u @ self.sym @ u)

    def classify(self, tol: float = 1e-8) -> str:
        """'nondegenerate' (rank 3), 'line_pair' (rank 2) or 'double_line' (rank 1).

        The matrix is symmetrically equilibrated first (a congruence, so
        the exact rank is untouched); otherwise the scale disparity of raw
        pixel coordinates alone would swamp the rank tolerance.
        """
        sym = self.canonical().sym
        rn = np.linalg.norm(sym, axis=1)
        d = 1.0 / np.sqrt(np.maximum(rn, 1e-30))
        s = np.linalg.svd(sym * np.outer(d, d), compute_uv=False)
        rank = int(np.sum(s > tol * s[0]))
        return {3: "nondegenerate", 2: "line_pair", 1: "double_line"}[rank]

    def transformed(self, h) -> "Conic":
        """Transport under the point map p -> h p (zero sets correspond)."""
        return transform_conic(self, h)

    def __repr__(self):
        a, b, c, d, e, f = self.canonical().coefficients()
        return f"Conic(a={a:.6g}, b={b:.6g}, c={c:.6g}, d={d:.6g}, e={e:.6g}, f={f:.6g})"


def transform_conic(conic: Conic, h) -> Conic:
    """Conic whose zero set is the image of ``conic`` under p -> h p."""
    h = require_invertible(h)
    hi = np.linalg.inv(h)
    return Conic(hi.T @ conic.sym @ hi)


def _real_quadratic_roots(a2, a1, a0, tiny=1e-14):
    scale = max(abs(a2), abs(a1), abs(a0))
    if scale == 0.0:
        return []
    a2, a1, a0 = a2 / scale, a1 / scale, a0 / scale
    if abs(a2) <= tiny:
        if abs(a1) <= tiny:
            return []
        return [-a0 / a1]
    disc = a1 * a1 - 4.0 * a2 * a0
    if disc < 0.0:
        return []
    r = np.sqrt(disc)
    # numerically stable split of the two roots
    q = -0.5 * (a1 + np.copysign(r, a1 if a1 != 0.0 else 1.0))
    roots = [q / a2]
    if q != 0.0:
        roots.append(a0 / q)
    else:
        roots.append(0.0)
    return roots


def _seek_point_on_conic(sym, viewport, grid=33):
    """A real point on the conic, preferably inside the viewport, or None."""
    xmin, ymin, xmax, ymax = viewport
    a, b, c = sym[0, 0], 2 * sym[0, 1], sym[1, 1]
    d, e, f = 2 * sym[0, 2], 2 * sym[1, 2], sym[2, 2]
    fallback = None
    pad_x = 0.5 * (xmax - xmin)
    pad_y = 0.5 * (ymax - ymin)
    for x in np.linspace(xmin - pad_x, xmax + pad_x, grid):
        for y in _real_quadratic_roots(c, b * x + e, a * x * x + d * x + f):
            p = np.array([x, y, 1.0])
            if xmin <= x <= xmax and ymin <= y <= ymax:
                return p
            if fallback is None:
                fallback = p
    for y in np.linspace(ymin - pad_y, ymax + pad_y, grid):
        for x in _real_quadratic_roots(a, b * y + d, c * y * y + e * y + f):
            p = np.array([x, y, 1.0])
            if xmin <= x <= xmax and ymin <= y <= ymax:
                return p
            if fallback is None:
                fallback = p
    return fallback


def conic_sample(conic: Conic, viewport, n: int = 256, seed_point=None):
    """Sample at most ``n`` points of a nondegenerate conic inside a viewport.

    viewport is (xmin, ymin, xmax, ymax) in pixels. Returns a list of
    polyline branches, each an (m, 3) array of finite homogeneous points
    (z = 1) ordered along the curve. An empty list means the conic has no
    real point in the viewport.

    The conic is swept through the rational parametrization by the pencil
    of lines through one of its own points, so every sample is incident to
    machine precision.
    """
    if conic.classify() != "nondegenerate":
        raise DegenerateInputError("cannot sample a degenerate conic")
    sym = conic.canonical().sym
    if seed_point is not None:
        q0 = normalize_hom(seed_point)
    else:
        q0 = _seek_point_on_conic(sym, viewport)
        if q0 is None:
            return []
        q0 = normalize_hom(q0)

    n = max(int(n), 4)
    theta = np.linspace(0.0, np.pi, n, endpoint=False)
    d = np.stack([np.cos(theta), np.sin(theta), np.zeros(n)], axis=1)
    d_sym_d = np.einsum("ni,ij,nj->n", d, sym, d)
    q_sym_d = d @ (sym @ q0)
    pts = d_sym_d[:, None] * q0[None, :] - 2.0 * q_sym_d[:, None] * d

    norms = np.linalg.norm(pts, axis=1)
    finite = (norms > 0) & (np.abs(pts[:, 2]) > 1e-12 * norms)
    x = np.full(n, np.nan)
    y = np.full(n, np.nan)
    x[finite] = pts[finite, 0] / pts[finite, 2]
    y[finite] = pts[finite, 1] / pts[finite, 2]
    xmin, ymin, xmax, ymax = viewport
    ok = finite & (x >= xmin) & (x <= xmax) & (y >= ymin) & (y <= ymax)
    if not np.any(ok):
        return []

    # group circularly consecutive valid samples into branches
    idx = np.flatnonzero(ok)
    breaks = np.flatnonzero(np.diff(idx) > 1)
    runs = np.split(idx, breaks + 1)
    if len(runs) > 1 and idx[0] == 0 and idx[-1] == n - 1:
        runs[0] = np.concatenate([runs[-1], runs[0]])
        runs.pop()
    branches = []
    for run in runs:
        branch = np.stack([x[run], y[run], np.ones(len(run))], axis=1)
        branches.append(branch)
    return branches
