"""Richardson extrapolation of sequences indexed by N → ∞.

The model is v(N) = L + Σ_k c_k N^(-p_k); with m exponents the last
m+1 points determine L exactly, and the spread against the fit with
one exponent fewer is the error estimate.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from mpmath import mp, mpf

from app.core.errors import DomainError


@dataclass(frozen=True, slots=True)
class RichardsonResult:
    limit: mpf
    error_estimate: mpf
    points_used: int


def _solve(points: Sequence[tuple[mpf, mpf]], exponents: Sequence[int]) -> mpf:
    if not exponents:
        return points[-1][1]
    rows = [[mpf(1)] + [mp.power(n, -p) for p in exponents] for n, _ in points]
    rhs = [v for _, v in points]
    return mp.lu_solve(mp.matrix(rows), mp.matrix(rhs))[0]


def richardson(
    points: Iterable[tuple[int | float, object]],
    exponents: Sequence[int] = (1, 2, 3),
) -> RichardsonResult:
    """Extrapolate ``(N, value)`` pairs to N → ∞.

    Uses m = min(len(exponents), len(points) - 1) correction terms on the
    largest m+1 values of N.

    Raises:
        DomainError: With fewer than two points, no exponents, or a
            repeated N.
    """
    data = sorted((mpf(n), mpf(v)) for n, v in points)
    if len(data) < 2:
        raise DomainError(f"richardson needs at least two points, got {len(data)}")
    if not exponents:
        raise DomainError("richardson needs at least one correction exponent")
    ns = [n for n, _ in data]
    if len(set(ns)) != len(ns):
        raise DomainError("richardson points must have distinct N")
    if any(n <= 0 for n in ns):
        raise DomainError("richardson points must have positive N")
    m = min(len(exponents), len(data) - 1)
    used = data[-(m + 1):]
    limit = _solve(used, list(exponents[:m]))
    coarser = _solve(data[-m:], list(exponents[: m - 1]))
    return RichardsonResult(limit=limit, error_estimate=abs(limit - coarser), points_used=m + 1)
