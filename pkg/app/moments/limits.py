"""Large-N behaviour of the joint moments.

J_N(h) ~ c · N^δ with δ = s(s±1)/2 + Σ k h_k and
c = (group constant at s) · E[∏_k R_k(s±1/2)^(h_k)].
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb, factorial

from mpmath import mp, mpf

from app.bessel.moments import r_moments
from app.combinatorics.expansions import rnk_finite_expansion
from app.core.config import get_settings
from app.core.errors import DomainError
from app.ensembles.averages import inv_e_average
from app.ensembles.spec import EnsembleSpec, Group, group_shift
from app.moments.exact import joint_moment_exact, log_base_moment
from app.moments.specs import (
    LeadingOrder,
    MomentSpec,
    bessel_parameter,
    group_exponent,
    log_group_prefactor,
)
from app.numerics.extrapolation import richardson
from app.numerics.precision import ExtReal, resolve_precision
from app.storage.cache import ResultCache

logger = logging.getLogger(__name__)

RATIO_N_GRID = (25, 50, 100, 200)


def _integer_exponents(h: Sequence[float]) -> dict[int, int]:
    out = {}
    for k, v in enumerate(h):
        if k == 0 or not v:
            continue
        if not float(v).is_integer():
            raise DomainError(f"leading order needs integer h_{k}, got {v}")
        out[k] = int(v)
    return out


def leading_order(group: Group, h: Sequence[float], *, precision: int | None = None) -> LeadingOrder:
    """Exponent δ and coefficient c of J_N(h) ~ c N^δ."""
    precision = resolve_precision(precision)
    h = tuple(h) or (0,)
    exponents = _integer_exponents(h)
    with mp.workprec(precision + 16):
        s = mp.fsum(mpf(v) for v in h)
        delta = group_exponent(group, s) + sum(k * v for k, v in exponents.items())
        r_avg = r_moments(bessel_parameter(group, s), exponents, precision=precision)
        coefficient = mp.exp(log_group_prefactor(group, s)) * r_avg
    return LeadingOrder(
        exponent=delta,
        coefficient=ExtReal.of(coefficient, precision),
        group=group,
        h=h,
    )


def ms_limit(group: Group, s: int, k: int, *, precision: int | None = None) -> LeadingOrder:
    """Leading order of M_s(G(N), k) = E|φ^(k)(0)|^s."""
    if s < 1 or k < 1:
        raise DomainError(f"M_s(G(N), k) needs s, k >= 1, got s={s}, k={k}")
    h = [0] * (k + 1)
    h[k] = s
    return leading_order(group, h, precision=precision)


def conjecture_g_factor(k: int, s: int, *, precision: int | None = None) -> ExtReal:
    """g(k; s) = P(s) Σ_{l ∈ {0..k}^s} ∏_j C(k, l_j) (-2)^(sk - Σ l) E[∏_j R_{l_j}(s - 1/2)].

    P(s) = 2^(s²/2 - 1) G(1+s) √Γ(1+2s) / √(G(1+2s) Γ(1+s)). Ordered tuples
    are grouped by multiset.
    """
    if k < 0 or s < 0:
        raise DomainError(f"g(k; s) needs k, s >= 0, got k={k}, s={s}")
    precision = resolve_precision(precision)
    with mp.workprec(precision + 16):
        prefactor = mp.exp(log_group_prefactor("so", s)) / 2
        a = mpf(s) - mpf(1) / 2
        terms = []
        for ls in combinations_with_replacement(range(k + 1), s):
            counts = Counter(ls)
            orderings = factorial(s)
            weight = mpf(1)
            for l, m in counts.items():
                orderings //= factorial(m)
                weight *= mpf(comb(k, l)) ** m
            sign_power = s * k - sum(ls)
            r_avg = r_moments(a, {l: m for l, m in counts.items() if l}, precision=precision)
            terms.append(orderings * weight * mpf(-2) ** sign_power * r_avg)
        value = prefactor * mp.fsum(terms)
    return ExtReal.of(value, precision)


# ---------------------------------------------------------------------------
# Explicit second-moment ratios
# ---------------------------------------------------------------------------


def ratio_closed_form(group: Group, s, k: int) -> mpf:
    """lim E|φ^(k)(0)|² |φ(0)|^(s-2) / (N^(2k) E|φ(0)|^s) as a rational function of s."""
    s = mpf(s)
    if group_shift(group) > 0:
        if k == 2:
            return 4 * (2 * s**3 + 5 * s**2 + 2 * s - 2) / ((2 * s + 1) * (2 * s - 1) * (2 * s + 3))
        if k == 4:
            num = (4 * s**6 + 56 * s**5 + 307 * s**4 + 806 * s**3 + 967 * s**2
                   + 380 * s + 36)
            den = (2 * s + 1) ** 2 * (2 * s + 7) * (2 * s + 5) * (2 * s + 3) * (2 * s - 1)
            return 16 * num / den
    else:
        if k == 2:
            return 4 * (2 * s**3 - s**2 - 2 * s - 1) / ((2 * s - 1) * (2 * s - 3) * (2 * s + 1))
        if k == 4:
            num = (4 * s**6 + 32 * s**5 + 87 * s**4 + 58 * s**3 - 109 * s**2
                   - 108 * s + 72)
            den = (2 * s - 1) ** 2 * (2 * s + 5) * (2 * s + 3) * (2 * s + 1) * (2 * s - 3)
            return 16 * num / den
    raise DomainError(f"closed ratios exist for k in (2, 4), got k={k}")


@dataclass(frozen=True, slots=True)
class RatioCheck:
    extrapolated: mpf
    error_estimate: mpf
    closed_form: mpf
    gap: mpf
    uncertain: bool
    points: tuple[tuple[int, mpf], ...]


def scaled_ratio(
    group: Group,
    n: int,
    s,
    k: int,
    *,
    precision: int | None = None,
    cache: ResultCache | None = None,
) -> mpf:
    """E|φ^(k)(0)|² |φ(0)|^(s-2) / (N^(2k) E|φ(0)|^s) at finite N.

    The ratio only involves E[R_{N,k}²] under the s-weighted law, so s < 2
    is allowed even though h_0 = s - 2 would be negative.
    """
    precision = resolve_precision(precision)
    if mpf(s) >= 2:
        spec = MomentSpec(group, n, (float(s) - 2,) + (0,) * (k - 1) + (2,))
        moment = joint_moment_exact(spec, precision=precision, cache=cache).value
        with mp.workprec(precision + 16):
            base = mp.exp(log_base_moment(group, n, s))
            return moment / (base * mpf(n) ** (2 * k))
    poly = rnk_finite_expansion(k, n) ** 2
    with mp.workprec(precision + 16 + 4 * n):
        value = inv_e_average(EnsembleSpec.for_group(group, n, s), poly)
        return value / mpf(n) ** (2 * k)


def limit_ratio_check(
    group: Group,
    s,
    k: int,
    *,
    n_grid: Sequence[int] = RATIO_N_GRID,
    tolerance: float = 1e-4,
    precision: int | None = None,
    cache: ResultCache | None = None,
) -> RatioCheck:
    """Richardson limit of :func:`scaled_ratio` against :func:`ratio_closed_form`.

    Raises:
        DomainError: Unless s > 1/2 (USp) or s > 3/2 (SO), and k in (2, 4).
    """
    s = mpf(s)
    bound = mpf(1) / 2 if group_shift(group) > 0 else mpf(3) / 2
    if s <= bound:
        raise DomainError(f"the {group} ratio limit needs s > {bound}, got s={s}")
    closed = ratio_closed_form(group, s, k)
    points = [
        (n, scaled_ratio(group, n, s, k, precision=precision, cache=cache)) for n in n_grid
    ]
    result = richardson(points, get_settings().richardson_exponents_list)
    gap = abs(result.limit - closed)
    uncertain = result.error_estimate > tolerance
    logger.info(
        "limit ratio checked",
        extra={"event": "limit_ratio", "group": group, "order": k, "residual": float(gap)},
    )
    return RatioCheck(
        extrapolated=result.limit,
        error_estimate=result.error_estimate,
        closed_form=closed,
        gap=gap,
        uncertain=uncertain,
        points=tuple(points),
    )


def exponent_slopes(
    spec: MomentSpec, n_grid: Sequence[int], *, precision: int | None = None
) -> list[mpf]:
    """Successive ln J_N ratios ln(J_{N2}/J_{N1}) / ln(N2/N1) along *n_grid*."""
    values = [
        joint_moment_exact(MomentSpec(spec.group, n, spec.h), precision=precision).value
        for n in n_grid
    ]
    with mp.workprec(resolve_precision(precision)):
        return [
            mp.log(v2 / v1) / mp.log(mpf(n2) / n1)
            for (n1, v1), (n2, v2) in zip(
                zip(n_grid, values), zip(n_grid[1:], values[1:]), strict=False
            )
        ]
