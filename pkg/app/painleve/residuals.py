"""Relative residuals of the σ-form Painlevé equations and the Toda identities.

Every residual is LHS - RHS divided by the largest absolute summand,
so values are comparable across parameters.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence

from mpmath import mp, mpf

from app.bessel.moments import bessel_e_moments
from app.core.errors import DomainError
from app.hankel.moments import laplace_t_derivs, log_hankel_constant
from app.numerics.differences import five_point
from app.numerics.precision import resolve_precision

logger = logging.getLogger(__name__)

LimitProvider = Callable[[mpf, mpf], mpf]


def relative_residual(summands: Sequence[mpf]) -> mpf:
    """Σ summands / max |summand| (0 when all vanish)."""
    scale = max((abs(s) for s in summands), default=mpf(0))
    if scale == 0:
        return mpf(0)
    return mp.fsum(summands) / scale


def pv_residual(sigma, d1, d2, t, n: int, a, b) -> mpf:
    """σ-Painlevé V:

    (tσ'')² = -4σ'³t + (a²+2at+4bt+t²+4σ)σ'² + (-2(a+2b+t)σ + 2N(a+t)(a+b+N))σ'
              + (σ - N(a+b+N))².
    """
    s, s1, s2, t, a, b = (mpf(v) for v in (sigma, d1, d2, t, a, b))
    if t <= 0:
        raise DomainError("the σ-PV residual needs t > 0")
    k = n * (a + b + n)
    return relative_residual(
        [
            (t * s2) ** 2,
            4 * s1**3 * t,
            -(a**2 + 2 * a * t + 4 * b * t + t**2 + 4 * s) * s1**2,
            -(-2 * (a + 2 * b + t) * s + 2 * n * (a + t) * (a + b + n)) * s1,
            -((s - k) ** 2),
        ]
    )


def piii_residual(tau, d1, d2, t, a) -> mpf:
    """σ-Painlevé III': (tτ'')² + 4τ'²(tτ' - τ) - (aτ' + 1)² = 0."""
    u, u1, u2, t, a = (mpf(v) for v in (tau, d1, d2, t, a))
    if t <= 0:
        raise DomainError("the σ-PIII' residual needs t > 0")
    return relative_residual(
        [
            (t * u2) ** 2,
            4 * u1**2 * t * u1,
            -4 * u1**2 * u,
            -((a * u1 + 1) ** 2),
        ]
    )


def toda_residual_finite(n: int, a, b, t, *, precision: int | None = None) -> mpf:
    """Desnanot–Jacobi identity between Hankel determinants of sizes N-1, N, N+1.

    Φ_{N+1}(a-2) Φ_{N-1}(a+2) = Φ_N Φ_N'' - Φ_N'² for the same entry
    sequence, written in normalized expectations E = C Φ.
    """
    if n < 2:
        raise DomainError(f"the finite Toda identity needs N >= 2, got {n}")
    if mpf(a) <= 1:
        raise DomainError(f"the finite Toda identity needs a > 1, got a={a}")
    precision = resolve_precision(precision)
    upper = laplace_t_derivs(n + 1, mpf(a) - 2, b, t, 0, precision=precision)[0]
    lower = laplace_t_derivs(n - 1, mpf(a) + 2, b, t, 0, precision=precision)[0]
    e0, e1, e2 = laplace_t_derivs(n, a, b, t, 2, precision=precision)
    with mp.workprec(precision):
        log_ratio = (
            2 * log_hankel_constant(n, a, b)
            - log_hankel_constant(n + 1, mpf(a) - 2, b)
            - log_hankel_constant(n - 1, mpf(a) + 2, b)
        )
        lhs = upper * lower * mp.exp(log_ratio)
        return relative_residual([lhs, -e2 * e0, e1**2])


def toda_residual_limit(
    a, t, provider: LimitProvider, *, step: float = 0.02
) -> mpf:
    """Bessel-limit Toda identity E(a-2)E(a+2) = a²(a²-1)(E''E - E'²).

    Values come from *provider(a, t)*; derivatives of E at parameter a
    by five-point differences. At t = 0 the derivatives are the exact
    moments E'(0) = -E[𝔢_1] and E''(0) = E[𝔢_1²].
    """
    a, t = mpf(a), mpf(t)
    if a <= 1:
        raise DomainError(f"the limit Toda identity needs a > 1, got a={a}")
    if t < 0:
        raise DomainError("t must be non-negative")
    if t == 0:
        e0 = provider(a, t)
        e1 = -bessel_e_moments(a, {1: 1})
        e2 = bessel_e_moments(a, {1: 2})
    else:
        derivs = five_point(lambda u: provider(a, u), t, step)
        e0, e1, e2 = derivs.f, derivs.d1, derivs.d2
    lhs = provider(a - 2, t) * provider(a + 2, t)
    factor = a**2 * (a**2 - 1)
    return relative_residual([lhs, -factor * e2 * e0, factor * e1**2])
