"""Exact finite-N joint moments.

With x_j = (1 - cos θ_j)/2 the eigenangle law of USp(2N) / SO(2N) is the
Jacobi ensemble with parameters (±1/2, ±1/2), |φ(0)| = ∏ 4x_j, and
|φ^(k)(0)| = |φ(0)| R_{N,k}(x). Hence

    J_N(h) = J_N(s, 0, …, 0) · E_Jacobi(s±1/2, ±1/2)[∏_k R_{N,k}^(h_k)].
"""

from __future__ import annotations

import logging
import time

from mpmath import mp, mpf

from app.combinatorics.epoly import EPolynomial
from app.combinatorics.expansions import rnk_finite_expansion
from app.core.errors import DomainError
from app.ensembles.averages import inv_e_average, log_norm
from app.ensembles.spec import EnsembleSpec, Group, group_shift
from app.moments.specs import MomentSpec
from app.numerics.precision import ExtReal, resolve_precision
from app.storage.cache import ResultCache

logger = logging.getLogger(__name__)


def log_base_moment(group: Group, n: int, s) -> mpf:
    """ln J_N(s, 0, …, 0) = Ns ln 4 + ln Z_N(s±1/2, ±1/2) - ln Z_N(±1/2, ±1/2)."""
    s = mpf(s)
    if s + group_shift(group) <= -1:
        raise DomainError(f"|φ(0)|^s is not integrable for {group} with s={s}")
    return (
        n * s * mp.ln(4)
        + log_norm(EnsembleSpec.for_group(group, n, s))
        - log_norm(EnsembleSpec.for_group(group, n, 0))
    )


def base_moment_closed(group: Group, n: int, s, *, precision: int | None = None) -> ExtReal:
    """E_G(N)|φ(0)|^s in Gamma-function form."""
    precision = resolve_precision(precision)
    with mp.workprec(precision + 16):
        value = mp.exp(log_base_moment(group, n, s))
    return ExtReal.of(value, precision)


def derivative_product(spec: MomentSpec) -> EPolynomial:
    """∏_k R_{N,k}^(h_k) as a concrete e-polynomial in the inverse points.

    Raises:
        DomainError: If some h_k (k >= 1) is not an integer.
    """
    if not spec.integer_derivatives:
        raise DomainError("exact moments need integer h_1, …, h_m; use the Monte Carlo mode")
    poly = EPolynomial.constant(1)
    for k, count in spec.derivative_exponents.items():
        poly = poly * rnk_finite_expansion(k, spec.n) ** int(count)
    return poly


def derivative_ratio_average(spec: MomentSpec, *, precision: int | None = None) -> mpf:
    """E_Jacobi(s±1/2, ±1/2)[∏_k R_{N,k}^(h_k)]."""
    precision = resolve_precision(precision)
    poly = derivative_product(spec)
    with mp.workprec(precision + 16 + 4 * spec.n):
        value = inv_e_average(EnsembleSpec.for_group(spec.group, spec.n, spec.s), poly)
    with mp.workprec(precision):
        return +value


def _cache_payload(spec: MomentSpec, precision: int) -> dict:
    return {
        "op": "joint_moment_exact",
        "group": spec.group,
        "n": spec.n,
        "h": [str(v) for v in spec.h],
        "precision_bits": precision,
    }


def joint_moment_exact(
    spec: MomentSpec, *, precision: int | None = None, cache: ResultCache | None = None
) -> ExtReal:
    """J_N(h_0, …, h_m) for integer h_1, …, h_m.

    Raises:
        DomainError: For non-integer derivative exponents.
        IntegrabilityError: If the inverse degree is too large for s ± 1/2.
    """
    precision = resolve_precision(precision)
    payload = _cache_payload(spec, precision)
    if cache is not None and (hit := cache.get(payload)) is not None:
        return hit
    started = time.perf_counter()
    ratio = derivative_ratio_average(spec, precision=precision)
    with mp.workprec(precision + 16):
        value = mp.exp(log_base_moment(spec.group, spec.n, spec.s)) * ratio
    result = ExtReal.of(value, precision)
    logger.debug(
        "exact joint moment",
        extra={
            "event": "joint_moment_exact",
            "group": spec.group,
            "n": spec.n,
            "precision_bits": precision,
            "latency_ms": round((time.perf_counter() - started) * 1000, 1),
        },
    )
    if cache is not None:
        cache.put(payload, result, precision)
    return result
