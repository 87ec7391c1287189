"""Small-t Taylor series of σ_N(t) = t d/dt ln E_N(t).

Two independent routes: order-by-order matching in the σ-PV equation
(seeded by the first two cumulants of p_1), and the series logarithm of
the exact derivatives Φ_N^(k)(0).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from mpmath import mp, mpf

from app.combinatorics.epoly import EPolynomial
from app.core.errors import DomainError, SingularRecursionError
from app.ensembles.averages import inv_e_average
from app.ensembles.spec import EnsembleSpec
from app.hankel.determinants import HankelSpec, hankel_t_derivs
from app.numerics.precision import resolve_precision

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class SigmaSeries:
    """σ(t) ≈ Σ_{k=1}^{M} c_k t^k (c_0 = 0)."""

    coefficients: tuple[mpf, ...]
    n: int
    a: mpf
    b: mpf

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def coefficient(self, k: int) -> mpf:
        if k == 0:
            return mpf(0)
        return self.coefficients[k - 1]

    def evaluate(self, t) -> mpf:
        t = mpf(t)
        return mp.fsum(c * t ** (k + 1) for k, c in enumerate(self.coefficients))


# ---------------------------------------------------------------------------
# Truncated power-series helpers
# ---------------------------------------------------------------------------


def _mul(p: list[mpf], q: list[mpf], size: int) -> list[mpf]:
    out = [mpf(0)] * size
    for i, x in enumerate(p[:size]):
        if not x:
            continue
        for j, y in enumerate(q[: size - i]):
            out[i + j] += x * y
    return out


def _shift(p: list[mpf], size: int) -> list[mpf]:
    """Multiply by t."""
    return ([mpf(0)] + p)[:size]


def _add(*series: list[mpf]) -> list[mpf]:
    size = max(len(s) for s in series)
    return [mp.fsum(s[i] for s in series if i < len(s)) for i in range(size)]


def _scale(p: list[mpf], c) -> list[mpf]:
    return [c * x for x in p]


def _pv_coefficient(sigma: list[mpf], k: int, n: int, a: mpf, b: mpf) -> mpf:
    """[t^k] of RHS - LHS of the σ-PV equation for the truncated series *sigma*."""
    size = k + 1
    s = (sigma + [mpf(0)] * size)[:size]
    d1 = [(i + 1) * s[i + 1] if i + 1 < size else mpf(0) for i in range(size)]
    d2 = [(i + 2) * (i + 1) * s[i + 2] if i + 2 < size else mpf(0) for i in range(size)]
    kk = n * (a + b + n)
    t_d2 = _shift(d2, size)
    d1_sq = _mul(d1, d1, size)
    quad = _add([a**2], _shift([2 * a + 4 * b], size), _shift(_shift([mpf(1)], size), size),
                _scale(s, 4))
    lin = _add(
        _scale(s, -2 * (a + 2 * b)),
        _scale(_shift(s, size), -2),
        [2 * n * a * (a + b + n)],
        _shift([2 * n * (a + b + n)], size),
    )
    sq = _add(s, [-kk])
    rhs = _add(
        _scale(_shift(_mul(d1_sq, d1, size), size), -4),
        _mul(quad, d1_sq, size),
        _mul(lin, d1, size),
        _mul(sq, sq, size),
    )
    lhs = _mul(t_d2, t_d2, size)
    return rhs[k] - lhs[k]


def sigma_series_from_pv(n: int, a, b, order: int, *, precision: int | None = None) -> SigmaSeries:
    """Coefficients c_1..c_M of σ_N from the σ-PV equation.

    c_1 = -N(a+b+N)/a cancels the t^0 balance. c_2 solves the quadratic
    t² balance; the root nearest Var(p_1) = E[e_1(1/x)²] - c_1² is kept.
    For k >= 3 the t^k balance is affine in c_k.

    Raises:
        DomainError: If ``order < 2`` or ``a <= 1`` (the variance seed needs a > 1).
        SingularRecursionError: If an affine step has a vanishing slope.
    """
    if order < 2:
        raise DomainError(f"the series needs order >= 2, got {order}")
    precision = resolve_precision(precision)
    with mp.workprec(precision + 32):
        a, b = mpf(a), mpf(b)
        if a <= 1:
            raise DomainError(f"the variance seed needs a > 1, got a={a}")
        spec = EnsembleSpec.jacobi(n, a, b)
        c1 = -n * (a + b + n) / a
        variance = inv_e_average(spec, EPolynomial.monomial((1, 1))) - c1**2

        def r2(c):
            return _pv_coefficient([mpf(0), c1, c], 2, n, a, b)

        f0, f1, fm = r2(mpf(0)), r2(mpf(1)), r2(mpf(-1))
        qa = (f1 + fm) / 2 - f0
        qb = (f1 - fm) / 2
        if qa == 0:
            if qb == 0:
                raise SingularRecursionError(2)
            c2 = -f0 / qb
        else:
            disc = qb**2 - 4 * qa * f0
            if disc < 0:
                disc = mpf(0)
            roots = [(-qb + mp.sqrt(disc)) / (2 * qa), (-qb - mp.sqrt(disc)) / (2 * qa)]
            c2 = min(roots, key=lambda r: abs(r - variance))
        coeffs = [mpf(0), c1, c2]
        for k in range(3, order + 1):
            base = _pv_coefficient(coeffs + [mpf(0)], k, n, a, b)
            slope = _pv_coefficient(coeffs + [mpf(1)], k, n, a, b) - base
            if abs(slope) <= mp.ldexp(max(abs(base), mpf(1)), -precision // 2):
                raise SingularRecursionError(k)
            coeffs.append(-base / slope)
        logger.debug(
            "sigma series solved", extra={"event": "sigma_series", "n": n, "order": order}
        )
    with mp.workprec(precision):
        return SigmaSeries(tuple(+c for c in coeffs[1:]), n, +a, +b)


def sigma_taylor_from_hankel(
    n: int, a, b, order: int, *, precision: int | None = None
) -> SigmaSeries:
    """Taylor coefficients of σ_N at 0 from Φ_N^(k)(0), k <= order (< a + 1)."""
    if order < 1:
        raise DomainError(f"the series needs order >= 1, got {order}")
    spec = HankelSpec(n, a, b, t=0, precision_bits=precision)
    derivs = hankel_t_derivs(spec, order)
    with mp.workprec(spec.precision_bits):
        taylor = [d / (mp.factorial(k) * derivs[0]) for k, d in enumerate(derivs)]
        logs = [mpf(0)]
        for k in range(1, order + 1):
            acc = taylor[k] - mp.fsum(j * logs[j] * taylor[k - j] for j in range(1, k)) / k
            logs.append(acc)
        return SigmaSeries(tuple(k * logs[k] for k in range(1, order + 1)), n, spec.a, spec.b)
