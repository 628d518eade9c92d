"""Exception types raised across the package."""

from __future__ import annotations


class HeisenbergOQSError(Exception):
    """Base class for all package errors."""


class ValidationError(HeisenbergOQSError):
    """A scenario or one of its parts violates an invariant.

    ``violations`` is a list of :class:`heisenberg_oqs.model.Violation`.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"{v.code} at {v.field}: {v.message}" for v in self.violations)
        super().__init__(lines or "invalid scenario")


class NumericalError(HeisenbergOQSError):
    """Base for non-convergence failures (CLI exit code 3)."""


class SeriesNonConvergence(NumericalError):
    def __init__(self, message, partial_sums=(), location=None):
        self.partial_sums = list(partial_sums)
        self.location = location
        if location is not None:
            message = f"{message} (element {location})"
        super().__init__(message)


class QuadratureNonConvergence(NumericalError):
    def __init__(self, message, error_estimate=float("nan")):
        self.error_estimate = error_estimate
        super().__init__(f"{message}; achieved error estimate {error_estimate:.3e}")


class EigendecompositionFailure(NumericalError):
    pass


class DimensionOverflow(HeisenbergOQSError):
    def __init__(self, dimension, cap):
        self.dimension = dimension
        self.cap = cap
        super().__init__(f"Fock space dimension {dimension} exceeds cap {cap}")


class ProbabilityVectorInvalid(HeisenbergOQSError):
    pass
