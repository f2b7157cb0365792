"""Exception hierarchy for data-dependent geometric failures.

These are not crashes: they report degenerate or ill-posed input
configurations that a caller (CLI, HTTP service, UI) must surface as
"pick different points", with a machine-readable code.
"""

from __future__ import annotations


class GeometryError(Exception):
    """Base class for degenerate / ill-posed geometric configurations."""

    code = "geometry_error"

    def __init__(self, message: str, **detail):
        super().__init__(message)
        self.message = message
        self.detail = detail

    def payload(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.detail:
            out["detail"] = {k: v for k, v in self.detail.items()}
        return out


class DegenerateInputError(GeometryError):
    """Inputs collapse an operation (e.g. join of projectively equal points)."""

    code = "degenerate_input"


class DegeneratePencilError(GeometryError):
    """Coincident lines make a cross-ratio denominator vanish."""

    code = "degenerate_pencil"


class IllConditionedConfigurationError(GeometryError):
    """A point configuration is too close to collinear to normalize."""

    code = "ill_conditioned_configuration"


class RedundantConfigurationError(GeometryError):
    """Points collinear with an epipole duplicate an epipolar line."""

    code = "redundant_configuration"


class CoincidentSolutionError(GeometryError):
    """A solver's output collides with one of its own input points."""

    code = "coincident_solution"


class UnderdeterminedError(GeometryError):
    """The constraint system has too little rank to pin the answer."""

    code = "underdetermined"


class NoSolutionError(GeometryError):
    """A search found no real solution on the admissible domain."""

    code = "no_solution"


class DegenerateDataError(GeometryError):
    """A data matrix lost rank (duplicated or collinear measurements)."""

    code = "degenerate_data"


class GenerationFailureError(GeometryError):
    """Synthetic scene constraints could not be met within the retry budget."""

    code = "generation_failure"
