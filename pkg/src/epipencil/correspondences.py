"""Point correspondences between two images, with cached conditioning.

Determinant-heavy computations run on conditioned coordinates: each
image's points are mapped by an isotropic similarity taking their
centroid to the origin and their RMS radius to sqrt(2), then every
triple is scaled to unit norm. Raw pixel magnitudes (~1e3) would
otherwise drown the degree-4 products in roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError
from .projective import as_hom, normalize_hom


@dataclass(frozen=True)
class Correspondence:
    """One matched pair: p in image 1, p_prime in image 2 (homogeneous pixels)."""

    p: np.ndarray
    p_prime: np.ndarray


def normalizing_similarity(pts: np.ndarray) -> np.ndarray:
    """Similarity sending finite points to centroid 0 and RMS radius sqrt(2)."""
    z = pts[:, 2]
    if np.any(np.abs(z) < 1e-12 * np.linalg.norm(pts, axis=1)):
        raise DegenerateDataError("conditioning requires finite points")
    xy = pts[:, :2] / z[:, None]
    centroid = xy.mean(axis=0)
    rms = float(np.sqrt(np.mean(np.sum((xy - centroid) ** 2, axis=1))))
    if rms < 1e-12:
        raise DegenerateDataError("all points coincide; cannot condition")
    s = np.sqrt(2.0) / rms
    return np.array(
        [[s, 0.0, -s * centroid[0]], [0.0, s, -s * centroid[1]], [0.0, 0.0, 1.0]]
    )


def _unit_rows(a: np.ndarray) -> np.ndarray:
    return a / np.linalg.norm(a, axis=1, keepdims=True)


class CorrSet:
    """Ordered list of correspondences, optionally carrying the known
    epipole or epipolar line of image 1 (as used by problem files)."""

    def __init__(self, pts1, pts2, epipole1=None, epiline1=None):
        pts1 = self._coerce(pts1)
        pts2 = self._coerce(pts2)
        if pts1.shape != pts2.shape:
            raise ValueError(
                f"mismatched correspondence counts: {pts1.shape[0]} vs {pts2.shape[0]}"
            )
        if pts1.shape[0] < 2:
            raise ValueError("need at least 2 correspondences")
        self.pts1 = pts1
        self.pts2 = pts2
        self.epipole1 = None if epipole1 is None else as_hom(epipole1)
        self.epiline1 = None if epiline1 is None else as_hom(epiline1)
        self._cache = {}

    @staticmethod
    def _coerce(pts) -> np.ndarray:
        a = np.asarray(pts, dtype=float)
        if a.ndim != 2 or a.shape[1] not in (2, 3):
            raise ValueError(f"expected an (n, 2) or (n, 3) array, got {a.shape}")
        if a.shape[1] == 2:
            a = np.hstack([a, np.ones((a.shape[0], 1))])
        if not np.all(np.isfinite(a)):
            raise ValueError("non-finite point coordinates")
        a = a.copy()
        a.setflags(write=False)
        return a

    def __len__(self) -> int:
        return self.pts1.shape[0]

    def __getitem__(self, i: int) -> Correspondence:
        return Correspondence(self.pts1[i].copy(), self.pts2[i].copy())

    def subset(self, indices) -> "CorrSet":
        idx = list(indices)
        return CorrSet(
            self.pts1[idx],
            self.pts2[idx],
            epipole1=self.epipole1,
            epiline1=self.epiline1,
        )

    def swapped(self) -> "CorrSet":
        """The same matches with the two images exchanged."""
        return CorrSet(self.pts2, self.pts1)

    # -- conditioning ------------------------------------------------------

    @property
    def t1(self) -> np.ndarray:
        if "t1" not in self._cache:
            self._cache["t1"] = normalizing_similarity(self.pts1)
        return self._cache["t1"]

    @property
    def t2(self) -> np.ndarray:
        if "t2" not in self._cache:
            self._cache["t2"] = normalizing_similarity(self.pts2)
        return self._cache["t2"]

    @property
    def t1_inv(self) -> np.ndarray:
        if "t1i" not in self._cache:
            self._cache["t1i"] = np.linalg.inv(self.t1)
        return self._cache["t1i"]

    @property
    def t2_inv(self) -> np.ndarray:
        if "t2i" not in self._cache:
            self._cache["t2i"] = np.linalg.inv(self.t2)
        return self._cache["t2i"]

    @property
    def conditioned1(self) -> np.ndarray:
        """Unit-normalized conditioned image-1 points, one row per match."""
        if "c1" not in self._cache:
            self._cache["c1"] = _unit_rows(self.pts1 @ self.t1.T)
        return self._cache["c1"]

    @property
    def conditioned2(self) -> np.ndarray:
        if "c2" not in self._cache:
            self._cache["c2"] = _unit_rows(self.pts2 @ self.t2.T)
        return self._cache["c2"]

    def condition_point1(self, p) -> np.ndarray:
        """Map an image-1 homogeneous point into the conditioned frame."""
        return normalize_hom(self.t1 @ as_hom(p))

    def condition_point2(self, p) -> np.ndarray:
        return normalize_hom(self.t2 @ as_hom(p))

    def __repr__(self):
        extras = []
        if self.epipole1 is not None:
            extras.append("epipole1")
        if self.epiline1 is not None:
            extras.append("epiline1")
        tail = f", with {'+'.join(extras)}" if extras else ""
        return f"CorrSet(n={len(self)}{tail})"
