"""Exact joint moments of 𝔢_k(a), R_k(a) and limits of mixed 𝔭-moments.

E[∏_k 𝔢_k^(h_k)] reduces to Laguerre averages of inverse e-products,

    (1 / Q!) Σ_{j=m}^{Q} (-1)^(Q+j) C(Q, j) E_j^Lag(a)[∏ e_k(1/x)^(h_k)],

with Q = Σ k h_k and m the top index, and 𝔢_k = lim N^(-k) e_k(1/y) over
Laguerre points y. No (k!)^(h_k) factor appears: the constant array cI has
limits c^k/k!, and the sum reproduces exactly that.
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from math import comb, factorial

from mpmath import mp, mpf

from app.bessel.laplace import laplace_e1
from app.combinatorics.epoly import EPolynomial, coefficient_to_mpf
from app.combinatorics.expansions import rk_limit_expansion
from app.core.config import get_settings
from app.core.errors import DomainError, IntegrabilityError
from app.ensembles.averages import inv_e_average
from app.ensembles.spec import EnsembleSpec
from app.hankel.moments import inverse_degree, laplace_moment, normalize_powers
from app.numerics.differences import default_step, five_point
from app.numerics.extrapolation import richardson
from app.numerics.precision import resolve_precision

logger = logging.getLogger(__name__)

DEFAULT_N_GRID = (8, 16, 32, 64)

# Cases with closed right-hand sides in terms of E and its t-derivatives.
_IDENTITY_CASES = ({2: 1}, {2: 2})


def _exponents(h: Mapping[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for k, count in h.items():
        if int(k) != k or int(count) != count:
            raise DomainError(f"exact moments need integer indices and exponents, got {k}:{count}")
        k, count = int(k), int(count)
        if k < 1 or count < 0:
            raise DomainError(f"e-moments need k >= 1 and h_k >= 0, got {k}:{count}")
        if count:
            out[k] = count
    return dict(sorted(out.items()))


def bessel_e_moments(a, h: Mapping[int, int], *, precision: int | None = None) -> mpf:
    """E[∏_k 𝔢_k(a)^(h_k)].

    Raises:
        IntegrabilityError: Unless ``Σ h_k < a + 1`` and ``a > 0``.
    """
    h = _exponents(h)
    precision = resolve_precision(precision)
    if not h:
        return mpf(1)
    with mp.workprec(precision + 32):
        a = mpf(a)
        factors = sum(h.values())
        if a <= 0 or factors >= a + 1:
            raise IntegrabilityError(
                f"e-moments need a > 0 and Σ h_k < a + 1, got a={a}, Σ h_k={factors}"
            )
        q_total = sum(k * count for k, count in h.items())
        top = max(h)
        product = EPolynomial.monomial([k for k, count in h.items() for _ in range(count)])
        total = mp.fsum(
            (-1) ** (q_total + j)
            * comb(q_total, j)
            * inv_e_average(EnsembleSpec.laguerre(j, a), product)
            for j in range(top, q_total + 1)
        )
        value = total / factorial(q_total)
    with mp.workprec(precision):
        return +value


def bessel_e_average(a, poly: EPolynomial, *, precision: int | None = None) -> mpf:
    """E[P(𝔢_1(a), 𝔢_2(a), …)] for a concrete e-polynomial P."""
    precision = resolve_precision(precision)
    with mp.workprec(precision + 16):
        total = mp.fsum(
            coefficient_to_mpf(coeff) * bessel_e_moments(a, Counter(key), precision=precision)
            for key, coeff in poly
        )
    with mp.workprec(precision):
        return +total


def r_moments(a, h: Mapping[int, int], *, precision: int | None = None) -> mpf:
    """E[∏_k R_k(a)^(h_k)] through the e-expansion of each R_k."""
    poly = EPolynomial.constant(1)
    for k, count in _exponents(h).items():
        poly = poly * rk_limit_expansion(k) ** count
    return bessel_e_average(a, poly, precision=precision)


# ---------------------------------------------------------------------------
# Mixed moments E[e^(-t 𝔢_1) ∏ 𝔭_q^(n_q)]
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class PMomentResult:
    """Extrapolated limit, optional closed right side, and the finite-N data."""

    value: mpf
    error_estimate: mpf
    closed_form: mpf | None
    closed_form_error: mpf | None
    uncertain: bool
    points: tuple[tuple[int, mpf], ...]

    @property
    def discrepancy(self) -> mpf | None:
        if self.closed_form is None:
            return None
        return abs(self.value - self.closed_form)


def limit_identity_rhs(
    a, t, powers: Mapping[int, int], *, tolerance: float | None = None
) -> tuple[mpf, mpf]:
    """Closed right side for 𝔭_2 or 𝔭_2² from E(t) = E[e^(-t 𝔢_1)] and its derivatives.

    Returns ``(value, error_estimate)``; the estimate compares steps h and 2h.

    Raises:
        DomainError: For other power maps or t <= 0.
    """
    powers = normalize_powers(powers)
    if powers not in _IDENTITY_CASES:
        raise DomainError(f"no closed right side for powers {powers}")
    a, t = mpf(a), mpf(t)
    if t <= 0:
        raise DomainError("the closed right sides need t > 0")
    tolerance = get_settings().FREDHOLM_TOLERANCE if tolerance is None else tolerance

    def e_of(u: mpf) -> mpf:
        return laplace_e1(a, u, tolerance).value

    def combine(step: float) -> mpf:
        d = five_point(e_of, t, step)
        if powers == {2: 1}:
            return (a / t) * d.d1 + d.f / t
        return (
            (a**2 + 2) / t**2 * d.d2
            + (-3 * a**2 + 2 * a * t) / t**3 * d.d1
            + (t - 3 * a) / t**3 * d.f
        )

    step = min(default_step(tolerance), float(t) / 4)
    fine = combine(step)
    coarse = combine(2 * step)
    return fine, abs(fine - coarse)


def scaled_finite_sequence(
    a,
    t,
    powers: Mapping[int, int],
    *,
    n_grid: Sequence[int] = DEFAULT_N_GRID,
    b=None,
    precision: int | None = None,
) -> list[tuple[int, mpf]]:
    """(N, N^(-2Q) E_N^(a,b)[e^(-(t/N²) p_1) ∏ p_q^(n_q)]) for N in *n_grid*."""
    powers = normalize_powers(powers)
    degree = inverse_degree(powers)
    b = get_settings().REFERENCE_B if b is None else b
    precision = resolve_precision(precision)
    points = []
    for n in n_grid:
        with mp.workprec(precision):
            u = mpf(t) / n**2
        value = laplace_moment(n, a, b, u, powers, precision=precision).value
        with mp.workprec(precision):
            points.append((n, value / mpf(n) ** (2 * degree)))
    return points


def p_moments_mixed(
    a,
    t,
    powers: Mapping[int, int] | None = None,
    *,
    n_grid: Sequence[int] = DEFAULT_N_GRID,
    b0=None,
    tolerance: float = 1e-3,
    precision: int | None = None,
) -> PMomentResult:
    """E[e^(-t 𝔢_1(a)) ∏_q 𝔭_q(a)^(n_q)] as a Richardson limit over N.

    For 𝔭_2 and 𝔭_2² the closed right side from :func:`limit_identity_rhs`
    is reported alongside. ``uncertain`` is set when the extrapolation
    error exceeds *tolerance*.

    Raises:
        DomainError: If a power index q < 2 is given.
        IntegrabilityError: If ``a <= Σ q n_q - 1``.
    """
    powers = normalize_powers(powers)
    if any(q < 2 for q in powers):
        raise DomainError("mixed moments take power sums 𝔭_q with q >= 2")
    if not powers:
        e = laplace_e1(a, t)
        return PMomentResult(
            value=e.value,
            error_estimate=mpf(e.increment),
            closed_form=None,
            closed_form_error=None,
            uncertain=not e.converged,
            points=(),
        )
    degree = inverse_degree(powers)
    if mpf(a) <= degree - 1:
        raise IntegrabilityError(f"the limit moment needs a > {degree - 1}, got a={a}")
    points = scaled_finite_sequence(a, t, powers, n_grid=n_grid, b=b0, precision=precision)
    extrapolated = richardson(points, get_settings().richardson_exponents_list)
    closed, closed_error = None, None
    if powers in _IDENTITY_CASES and mpf(t) > 0:
        closed, closed_error = limit_identity_rhs(a, t, powers)
    uncertain = extrapolated.error_estimate > tolerance
    if uncertain:
        logger.warning(
            "extrapolation error above tolerance",
            extra={"event": "extrapolation_uncertain", "a": str(a), "t": str(t),
                   "residual": float(extrapolated.error_estimate)},
        )
    return PMomentResult(
        value=extrapolated.limit,
        error_estimate=extrapolated.error_estimate,
        closed_form=closed,
        closed_form_error=closed_error,
        uncertain=uncertain,
        points=tuple(points),
    )
