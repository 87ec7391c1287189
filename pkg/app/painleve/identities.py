"""Finite-N Laplace identities for E_N[e^(-t p_1) p_2] and E_N[e^(-t p_1) p_2²].

Both sides are exact: the left from the composition sum of shifted
Hankel determinants, the right from derivatives of E_N(t).
"""

from __future__ import annotations

from mpmath import mp, mpf

from app.core.errors import DomainError
from app.hankel.moments import laplace_moment, laplace_t_derivs
from app.numerics.precision import resolve_precision
from app.painleve.residuals import relative_residual


def p2_identity_rhs(n: int, a, b, t, e0, e1) -> mpf:
    """(a/t - 1) E' + N(a+b+N)/t · E."""
    a, b, t = mpf(a), mpf(b), mpf(t)
    return (a / t - 1) * e1 + n * (a + b + n) / t * e0


def p2_squared_identity_rhs(n: int, a, b, t, e0, e1, e2) -> mpf:
    """((a-t)²+2)/t² E'' + N(a+b+N)((1+N²+(a+b)N)t - 3a)/t³ E + c₁(t)/t³ E'."""
    a, b, t = mpf(a), mpf(b), mpf(t)
    k = n * (a + b + n)
    c2 = ((a - t) ** 2 + 2) / t**2
    c0 = k * ((1 + n**2 + (a + b) * n) * t - 3 * a) / t**3
    c1 = (
        -3 * a**2
        + (2 * n**2 * a + 2 * a * (a + b) * n + a - 2 * b) * t
        - (2 * n**2 + 2 * (a + b) * n) * t**2
    ) / t**3
    return c2 * e2 + c1 * e1 + c0 * e0


def p2_identity_residual(n: int, a, b, t, *, precision: int | None = None) -> mpf:
    """Relative gap of E_N[e^(-t p_1) p_2] = (a/t - 1)E' + N(a+b+N)E/t (a > 1, t > 0)."""
    if mpf(a) <= 1 or mpf(t) <= 0:
        raise DomainError("the p_2 identity needs a > 1 and t > 0")
    precision = resolve_precision(precision)
    lhs = laplace_moment(n, a, b, t, {2: 1}, precision=precision).value
    e0, e1 = laplace_t_derivs(n, a, b, t, 1, precision=precision)
    with mp.workprec(precision):
        return relative_residual([lhs, -p2_identity_rhs(n, a, b, t, e0, e1)])


def p2_squared_identity_residual(n: int, a, b, t, *, precision: int | None = None) -> mpf:
    """Relative gap of the E_N[e^(-t p_1) p_2²] identity (a > 3, t > 0)."""
    if mpf(a) <= 3 or mpf(t) <= 0:
        raise DomainError("the p_2² identity needs a > 3 and t > 0")
    precision = resolve_precision(precision)
    lhs = laplace_moment(n, a, b, t, {2: 2}, precision=precision).value
    e0, e1, e2 = laplace_t_derivs(n, a, b, t, 2, precision=precision)
    with mp.workprec(precision):
        return relative_residual([lhs, -p2_squared_identity_rhs(n, a, b, t, e0, e1, e2)])
