"""Joint Laplace moments E_N[e^(-t p_1) ∏_q p_q^(n_q)] over the Jacobi ensemble.

p_q = Σ_j x_j^(-q). Expanding each power sum over compositions turns the
average into a weighted sum of column-shifted Hankel determinants,

    C_N Σ_l ∏_q multinomial(l_q) · det[g_{i+j+Σ_q q·l_{q,j}}(t)],

with C_N = Γ(b+1)^N / Z_N^(a,b).
"""

from __future__ import annotations

import logging
import time
from collections.abc import Mapping
from dataclasses import dataclass
from itertools import product

from mpmath import mp, mpf

from app.combinatorics.partitions import compositions_bounded
from app.core.errors import DomainError, IntegrabilityError
from app.ensembles.averages import log_norm
from app.ensembles.spec import EnsembleSpec
from app.hankel.determinants import HankelSpec, hankel_system, hankel_t_derivs, working_bits
from app.hankel.entries import EntryMethod, MethodTag, method_tag
from app.numerics.precision import resolve_precision

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class MomentResult:
    value: mpf
    method: MethodTag
    precision_bits: int
    term_count: int


def log_hankel_constant(n: int, a, b) -> mpf:
    """ln C_N = N ln Γ(b+1) - ln Z_N^(a,b)."""
    spec = EnsembleSpec.jacobi(n, a, b)
    return n * mp.loggamma(spec.b + 1) - log_norm(spec)


def normalize_powers(powers: Mapping[int, int] | None) -> dict[int, int]:
    """Drop zero exponents and validate q >= 1, n_q >= 0."""
    out: dict[int, int] = {}
    for q, count in (powers or {}).items():
        q, count = int(q), int(count)
        if q < 1 or count < 0:
            raise DomainError(f"power sums need q >= 1 and n_q >= 0, got {q}:{count}")
        if count:
            out[q] = count
    return dict(sorted(out.items()))


def inverse_degree(powers: Mapping[int, int]) -> int:
    """Σ q·n_q."""
    return sum(q * count for q, count in powers.items())


def composition_shifts(n: int, powers: Mapping[int, int]) -> dict[tuple[int, ...], int]:
    """Column shift vectors with their aggregated multinomial weights."""
    per_q = [
        [(tuple(q * l for l in comp), weight) for comp, weight in compositions_bounded(count, n)]
        for q, count in powers.items()
    ]
    shifts: dict[tuple[int, ...], int] = {}
    for combo in product(*per_q) if per_q else [()]:
        vector = [0] * n
        weight = 1
        for part, w in combo:
            weight *= w
            for j, s in enumerate(part):
                vector[j] += s
        key = tuple(vector)
        shifts[key] = shifts.get(key, 0) + weight
    return shifts


def laplace_moment(
    n: int,
    a,
    b,
    t,
    powers: Mapping[int, int] | None = None,
    *,
    precision: int | None = None,
    method: EntryMethod | None = None,
) -> MomentResult:
    """E_N^(a,b)[e^(-t p_1) ∏_q p_q^(n_q)].

    Raises:
        IntegrabilityError: If ``a <= Σ q n_q - 1``.
    """
    precision = resolve_precision(precision)
    powers = normalize_powers(powers)
    degree = inverse_degree(powers)
    if mpf(a) <= degree - 1:
        raise IntegrabilityError(
            f"the moment needs a > Σ q n_q - 1 = {degree - 1}, got a={a}"
        )
    started = time.perf_counter()
    bits = working_bits(precision, n)
    shifts = composition_shifts(n, powers)
    extra = max(max(v) for v in shifts)
    with mp.workprec(bits):
        system = hankel_system(n, a, b, t, extra, bits, method)
        total = mp.fsum(
            weight * system.replacement_ratio({j: j + s for j, s in enumerate(key)})
            for key, weight in sorted(shifts.items())
        )
        value = mp.exp(log_hankel_constant(n, a, b)) * system.det() * total
    logger.debug(
        "laplace moment evaluated",
        extra={
            "event": "laplace_moment",
            "n": n,
            "a": str(a),
            "t": str(t),
            "precision_bits": precision,
            "latency_ms": round((time.perf_counter() - started) * 1000, 1),
        },
    )
    with mp.workprec(precision):
        return MomentResult(
            value=+value,
            method=method_tag(t, method),
            precision_bits=precision,
            term_count=len(shifts),
        )


def laplace_t_derivs(
    n: int, a, b, t, order: int, *, precision: int | None = None
) -> list[mpf]:
    """E_N(t) = C_N Φ_N(t) and its first *order* derivatives."""
    spec = HankelSpec(n, a, b, t=t, precision_bits=precision)
    derivs = hankel_t_derivs(spec, order)
    with mp.workprec(spec.precision_bits):
        constant = mp.exp(log_hankel_constant(n, a, b))
        return [constant * d for d in derivs]
