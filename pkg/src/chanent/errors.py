"""Exception types shared across the package."""

from __future__ import annotations


class ChanentError(Exception):
    """Base class for all package errors."""


class DimensionError(ChanentError, ValueError):
    """Operator or factor dimensions are inconsistent."""

    def __init__(self, message: str, factor: str | int | None = None):
        super().__init__(message)
        self.factor = factor


class DomainError(ChanentError, ValueError):
    """An input lies outside the domain of a function (e.g. a negative eigenvalue)."""


class ValidationError(ChanentError, ValueError):
    """A structural check failed; ``defect_norms`` holds the measured defects."""

    def __init__(self, message: str, defect_norms: dict[str, float] | None = None):
        super().__init__(message)
        self.defect_norms = dict(defect_norms or {})


class NotTeleCovariantError(ValidationError):
    """A closed-form routine was called on a channel that failed the covariance check."""


class ConvergenceError(ChanentError, RuntimeError):
    """An iterative routine stopped without converging."""

    def __init__(self, message: str, iterations: int | None = None):
        super().__init__(message)
        self.iterations = iterations


class SolverError(ChanentError, RuntimeError):
    """An SDP solve ended infeasible, unbounded or inaccurate."""

    def __init__(self, message: str, status: str = "failed", iterations: int | None = None):
        super().__init__(message)
        self.status = status
        self.iterations = iterations
