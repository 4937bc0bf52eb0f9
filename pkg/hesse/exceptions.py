"""
Error Types
Typed failures raised by the geometry modules and reported by the CLI.
"""

from typing import Any, Optional


class CubicLabError(Exception):
    """Base class for every domain error raised by the toolkit."""

    @property
    def name(self) -> str:
        return type(self).__name__


class DegenerateParameter(CubicLabError):
    """The Hesse parameter lies inside a guarded band (k near 1, or k near 0 where excluded)."""


class DomainError(CubicLabError):
    """An input lies outside the regime an operation is defined for."""


class RankError(CubicLabError):
    """A conic does not have the rank an operation requires."""


class NotOnHessian(CubicLabError):
    """A point expected on the Hessian curve is not on it."""


class NotOnCurve(CubicLabError):
    """A point expected on a cubic curve is not on it."""


class UnknownBranch(CubicLabError):
    """A branch label is not valid for the regime of k."""


class IdenticalPoints(CubicLabError):
    """Two points spanning a line are linearly dependent."""


class NotOnBoundary(CubicLabError):
    """A ray expected on the boundary of a cone component is not on it."""


class HypothesisFailed(CubicLabError):
    """A sampled sign certificate failed; the failing sample is attached."""

    def __init__(self, message: str, sample: Optional[Any] = None):
        super().__init__(message)
        self.sample = sample


class NoConvergence(CubicLabError):
    """An iterative solver did not reach its residual target."""


class AtInfinity(CubicLabError):
    """An affine classification was asked for a point on the line z = 0."""


class NumericalFailure(CubicLabError):
    """A library or runtime failure escaped an operation (singular matrix, Qhull, overflow, ...)."""

    def __init__(self, message: str, cause: Optional[BaseException] = None):
        super().__init__(message)
        self.cause = cause

    @classmethod
    def wrap(cls, error: BaseException) -> "NumericalFailure":
        return cls(f"{type(error).__name__}: {error}", cause=error)
