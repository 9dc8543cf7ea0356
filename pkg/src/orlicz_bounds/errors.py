"""Exception hierarchy.

Two top-level branches matter for the CLI exit codes: ``PreconditionError``
(bad inputs, violated preconditions; exit 2) and ``NumericError`` (internal
numeric failures; exit 1).
"""

from __future__ import annotations


class OrliczBoundsError(Exception):
    """Base class for every error raised by this package."""


class PreconditionError(OrliczBoundsError, ValueError):
    """An input violates a documented precondition."""


class DomainError(PreconditionError):
    """Argument outside the mathematical domain of an operation."""


class RangeError(PreconditionError):
    """Integer parameter (k, p, replication count, ...) out of range."""


class InfeasibleError(PreconditionError):
    """The instance is too small for the requested bound.

    Carries ``required_n``, the smallest sequence length that would satisfy
    the precondition.
    """

    def __init__(self, message: str, required_n: int | None = None):
        super().__init__(message)
        self.required_n = required_n


class TabulationError(PreconditionError):
    """Tabulated survival data is malformed or does not cover a request."""


class NonConvexError(PreconditionError):
    """An operation requiring a convex function received a non-convex one."""


class NumericError(OrliczBoundsError, RuntimeError):
    """Internal numeric failure."""


class QuadratureError(NumericError):
    """Quadrature failed to reach the requested tolerance.

    ``achieved_tol`` records the tolerance that was actually attained.
    """

    def __init__(self, message: str, achieved_tol: float | None = None):
        super().__init__(message)
        self.achieved_tol = achieved_tol


class UnboundedNormError(NumericError):
    """The modular sum exceeds 1 for every scaling; the norm is infinite."""


class PartitionError(NumericError):
    """The interval-partition construction could not certify its output."""
