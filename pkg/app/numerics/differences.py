"""Five-point finite-difference stencils.

Central stencils are fourth order for f' and f''; near a left
endpoint the one-sided forward stencils are used instead.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

from mpmath import mpf

from app.core.errors import DomainError


@dataclass(frozen=True, slots=True)
class Derivatives:
    """f and its first three derivatives at a point (f''' is second order)."""

    f: mpf
    d1: mpf
    d2: mpf
    d3: mpf
    step: mpf
    one_sided: bool


def default_step(tolerance: float) -> float:
    """Step balancing h⁴ truncation against rounding for a target tolerance."""
    if tolerance <= 0:
        raise DomainError("tolerance must be positive")
    return tolerance**0.25


def five_point(f: Callable[[mpf], mpf], t, step, *, lower=0) -> Derivatives:
    """Derivatives of *f* at *t* from five evaluations.

    A forward stencil is used when the central one would cross *lower*.
    """
    t, h = mpf(t), mpf(step)
    if h <= 0:
        raise DomainError("finite-difference step must be positive")
    if t - 2 * h >= lower:
        fm2, fm1, f0, f1, f2 = (f(t + k * h) for k in (-2, -1, 0, 1, 2))
        d1 = (fm2 - 8 * fm1 + 8 * f1 - f2) / (12 * h)
        d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * f1 - f2) / (12 * h * h)
        d3 = (-fm2 + 2 * fm1 - 2 * f1 + f2) / (2 * h**3)
        return Derivatives(f=f0, d1=d1, d2=d2, d3=d3, step=h, one_sided=False)
    if t < lower:
        raise DomainError(f"point {t} lies left of the domain boundary {lower}")
    f0, f1, f2, f3, f4 = (f(t + k * h) for k in range(5))
    d1 = (-25 * f0 + 48 * f1 - 36 * f2 + 16 * f3 - 3 * f4) / (12 * h)
    d2 = (35 * f0 - 104 * f1 + 114 * f2 - 56 * f3 + 11 * f4) / (12 * h * h)
    d3 = (-5 * f0 + 18 * f1 - 24 * f2 + 14 * f3 - 3 * f4) / (2 * h**3)
    return Derivatives(f=f0, d1=d1, d2=d2, d3=d3, step=h, one_sided=True)
