"""Wire formats shared by the CLI and the HTTP service.

Responses are serialized exclusively through ``model_dump_json`` so the
two front doors emit byte-identical JSON for the same problem.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ProblemFile(BaseModel):
    """A solve request: 4-6 pixel correspondences plus the known epipole
    (4 or 5 points) or the known epipolar line (6 points), all in image 1."""

    model_config = ConfigDict(extra="forbid")

    points1: list[tuple[float, float]] = Field(min_length=4, max_length=6)
    points2: list[tuple[float, float]] = Field(min_length=4, max_length=6)
    epipole1: Optional[list[float]] = None
    epiline1: Optional[list[float]] = None
    image_size1: Optional[tuple[int, int]] = None
    image_size2: Optional[tuple[int, int]] = None

    @model_validator(mode="after")
    def _check(self):
        n = len(self.points1)
        if len(self.points2) != n:
            raise ValueError("points1 and points2 must have the same length")
        if self.epipole1 is not None and len(self.epipole1) not in (2, 3):
            raise ValueError("epipole1 must have 2 or 3 components")
        if self.epiline1 is not None and len(self.epiline1) != 3:
            raise ValueError("epiline1 must have 3 components")
        if (self.epipole1 is None) == (self.epiline1 is None):
            raise ValueError("exactly one of epipole1 / epiline1 is required")
        if n in (4, 5) and self.epipole1 is None:
            raise ValueError(f"{n} correspondences require epipole1")
        if n == 6 and self.epiline1 is None:
            raise ValueError("6 correspondences require epiline1")
        return self


class SolveFourResponse(BaseModel):
    method: Literal["four_conic"] = "four_conic"
    conic: list[float]
    classification: str
    branches: list[list[tuple[float, float]]]


class SolveFiveResponse(BaseModel):
    method: Literal["five_cremona"] = "five_cremona"
    epipole: list[float]
    residual_rms: float
    alternates: list[list[float]]
    fmatrix: Optional[list[float]] = None


class SixCandidate(BaseModel):
    epipole1: list[float]
    epipole2: list[float]
    residual_rms: float


class SolveSixResponse(BaseModel):
    method: Literal["six_linesearch"] = "six_linesearch"
    candidates: list[SixCandidate]
    fmatrix: Optional[list[float]] = None


SolveResponse = Union[SolveFourResponse, SolveFiveResponse, SolveSixResponse]


class FmatrixRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    points1: list[tuple[float, float]] = Field(min_length=3)
    points2: list[tuple[float, float]] = Field(min_length=3)
    epipole1: list[float]
    epipole2: list[float]
    # extra image-1 points whose image-2 epipolar lines the caller wants
    # (lets a UI stay free of geometry computation)
    probe_points1: Optional[list[tuple[float, float]]] = None

    @model_validator(mode="after")
    def _check(self):
        if len(self.points1) != len(self.points2):
            raise ValueError("points1 and points2 must have the same length")
        for name in ("epipole1", "epipole2"):
            if len(getattr(self, name)) not in (2, 3):
                raise ValueError(f"{name} must have 2 or 3 components")
        return self


class FmatrixResponse(BaseModel):
    fmatrix: list[float]
    epipole1: list[float]
    epipole2: list[float]
    lines1: list[list[float]]
    lines2: list[list[float]]
    probe_lines2: Optional[list[list[float]]] = None
    mean_sym_distance_px: float


class ErrorBody(BaseModel):
    code: str
    message: str
    detail: Optional[dict] = None


class ErrorResponse(BaseModel):
    error: ErrorBody
