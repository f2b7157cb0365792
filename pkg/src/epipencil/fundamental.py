"""Fundamental-matrix assembly and evaluation.

Once both epipoles are known, three or more correspondences pin the
remaining degrees of freedom: the 3x3 matrix is the least-squares null
direction of the stacked linear system {F e = 0, F^T e' = 0,
p'^T F p = 0}, solved on conditioned coordinates. Forcing F e = 0 keeps
the result rank 2, so the epipolar pencils of the two images correspond
through it.
"""

from __future__ import annotations

import numpy as np

from .correspondences import Correspondence, CorrSet
from .errors import DegenerateInputError, GeometryError, UnderdeterminedError
from .projective import as_hom, normalize_hom

_RANK2_TOL = 1e-8


class FundMatrix:
    """Rank-2 fundamental matrix in canonical scale, with cached epipoles."""

    __slots__ = ("m", "e", "e_prime")

    def __init__(self, m):
        m = np.asarray(m, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DegenerateInputError("non-finite fundamental matrix")
        u, s, vt = np.linalg.svd(m)
        if s[0] == 0.0 or s[1] / s[0] < _RANK2_TOL:
            raise GeometryError("matrix rank below 2; no epipolar geometry")
        if s[2] / s[0] >= _RANK2_TOL:
            raise GeometryError(
                f"matrix not rank 2 (sigma3/sigma1 = {s[2] / s[0]:.3g})"
            )
        m = m / np.linalg.norm(m)
        flat = m.reshape(-1)
        if flat[np.argmax(np.abs(flat))] < 0.0:
            m = -m
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "e", normalize_hom(vt[2]))
        object.__setattr__(self, "e_prime", normalize_hom(u[:, 2]))

    def __setattr__(self, *_):
        raise AttributeError("FundMatrix is immutable")

    @classmethod
    def rank2_projected(cls, m) -> "FundMatrix":
        """Nearest rank-2 matrix (smallest singular value zeroed)."""
        u, s, vt = np.linalg.svd(np.asarray(m, dtype=float))
        s = s.copy()
        s[2] = 0.0
        return cls(u @ np.diag(s) @ vt)

    def flat(self) -> list:
        """Row-major 9-list in canonical scale (the serialization form)."""
        return [float(v) for v in self.m.reshape(-1)]

    def __repr__(self):
        return f"FundMatrix({np.array2string(self.m, precision=4)})"


def f_from_epipoles_and_corr(e, e_prime, corr: CorrSet) -> FundMatrix:
    """Fundamental matrix from both epipoles plus >= 3 correspondences."""
    if len(corr) < 3:
        raise ValueError("need at least 3 correspondences")
    e_n = corr.condition_point1(e)
    ep_n = corr.condition_point2(e_prime)
    p1 = corr.conditioned1
    p2 = corr.conditioned2

    rows = []
    for i in range(3):  # F e = 0
        row = np.zeros(9)
        row[3 * i : 3 * i + 3] = e_n
        rows.append(row)
    for j in range(3):  # F^T e' = 0
        row = np.zeros(9)
        row[j::3] = ep_n
        rows.append(row)
    for s in range(len(corr)):  # p'^T F p = 0
        rows.append(np.kron(p2[s], p1[s]))
    a = np.stack(rows)

    sv = np.linalg.svd(a, compute_uv=False)
    rank = int(np.sum(sv > 1e-10 * sv[0]))
    if rank < 8:
        raise UnderdeterminedError(
            f"epipole/correspondence system has rank {rank} < 8", rank=rank
        )
    _, _, vt = np.linalg.svd(a)
    f_n = vt[-1].reshape(3, 3)
    u, s, wt = np.linalg.svd(f_n)
    s = s.copy()
    s[2] = 0.0
    f_n = u @ np.diag(s) @ wt
    return FundMatrix(corr.t2.T @ f_n @ corr.t1)


def epipoles_from_f(f) -> tuple[np.ndarray, np.ndarray]:
    """(right, left) null directions: the image-1 and image-2 epipoles."""
    if not isinstance(f, FundMatrix):
        f = FundMatrix(f)
    return f.e.copy(), f.e_prime.copy()


def epipolar_transfer(f: FundMatrix, p) -> np.ndarray:
    """Epipolar line in image 2 of an image-1 point (a member of the pencil
    through the image-2 epipole)."""
    p = as_hom(p)
    line = f.m @ p
    if np.linalg.norm(line) <= 1e-12 * np.linalg.norm(p):
        raise DegenerateInputError("point coincides with the epipole; no transfer line")
    return line


def _point_line_distance_px(p, line) -> float:
    p = as_hom(p)
    n = float(np.hypot(line[0], line[1]))
    if abs(p[2]) < 1e-12 * np.linalg.norm(p) or n < 1e-300:
        raise DegenerateInputError("pixel distance needs a finite point and line")
    return abs(float(line @ p)) / (n * abs(p[2]))


def sym_epipolar_distance(f: FundMatrix, c: Correspondence) -> float:
    """Half-sum of the two point-to-epipolar-line pixel distances."""
    d2 = _point_line_distance_px(c.p_prime, f.m @ as_hom(c.p))
    d1 = _point_line_distance_px(c.p, f.m.T @ as_hom(c.p_prime))
    return 0.5 * (d1 + d2)
