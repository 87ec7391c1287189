"""Exception hierarchy shared by every numerical module.

Each error carries the CLI exit code it maps to, so the command layer
never has to inspect exception types one by one.
"""

from __future__ import annotations


class MomentsError(Exception):
    """Base class of all toolkit errors."""

    exit_code: int = 3


class DomainError(MomentsError, ValueError):
    """A parameter lies outside the domain of an operation."""

    exit_code = 3


class IntegrabilityError(DomainError):
    """A requested average or moment does not exist for the given exponent."""


class ConvergenceError(MomentsError, RuntimeError):
    """An adaptive procedure (quadrature, Fredholm, extrapolation) did not converge."""

    exit_code = 4


class PrecisionError(ConvergenceError):
    """The working precision is insufficient (sign instability, vanishing Φ)."""


class SingularRecursionError(MomentsError, ArithmeticError):
    """An order-by-order recursion met a vanishing leading coefficient."""

    exit_code = 4

    def __init__(self, order: int, message: str | None = None) -> None:
        self.order = order
        super().__init__(message or f"recursion is singular at order {order}")
