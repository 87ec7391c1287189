"""Least-squares check of the finite-N derivative structure.

For Q = Σ q n_q and M = Σ (q-1) n_q the moment with power sums is fitted as

    t^(Q-1) E_N[e^(-t p_1) ∏ p_q^(n_q)] = Σ_{m=0}^{M} R_m(t) E_N^(m)(t),

deg R_m <= Q - 1, on an oversampled t-grid. A small residual together with
coefficients that stay put under grid refinement supports the structure.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass

from mpmath import mp, mpf

from app.core.errors import DomainError
from app.hankel.moments import inverse_degree, laplace_moment, laplace_t_derivs, normalize_powers
from app.numerics.linalg import least_squares
from app.numerics.precision import resolve_precision

logger = logging.getLogger(__name__)

DEFAULT_T_RANGE = (0.25, 4.0)


@dataclass(frozen=True, slots=True)
class StructureFit:
    """Fitted R_m coefficients, ``coefficients[m][d]`` multiplies t^d E^(m)."""

    coefficients: tuple[tuple[mpf, ...], ...]
    residual: mpf
    drift: mpf
    grid_size: int

    @property
    def derivative_order(self) -> int:
        return len(self.coefficients) - 1

    def polynomial(self, m: int, t) -> mpf:
        t = mpf(t)
        return mp.fsum(c * t**d for d, c in enumerate(self.coefficients[m]))


def _grid(size: int, t_range: tuple[float, float]) -> list[mpf]:
    lo, hi = (mpf(v) for v in t_range)
    return [lo + (hi - lo) * i / (size - 1) for i in range(size)]


def _solve(
    n: int, a, b, powers: dict[int, int], grid: list[mpf], degree: int, order: int, precision: int
) -> tuple[list[mpf], mpf]:
    rows, rhs = [], []
    for t in grid:
        lhs = laplace_moment(n, a, b, t, powers, precision=precision).value
        derivs = laplace_t_derivs(n, a, b, t, order, precision=precision)
        rows.append([derivs[m] * t**d for m in range(order + 1) for d in range(degree)])
        rhs.append(t ** (degree - 1) * lhs)
    return least_squares(rows, rhs)


def fit_structure(
    n: int,
    a,
    b,
    powers: Mapping[int, int],
    *,
    oversampling: int = 2,
    t_range: tuple[float, float] = DEFAULT_T_RANGE,
    precision: int | None = None,
) -> StructureFit:
    """Fit the R_m polynomials and measure their drift on a doubled grid.

    Raises:
        DomainError: If no power sum of order q >= 2 is requested or the
            oversampling factor is below 2.
        IntegrabilityError: If ``a <= Q - 1`` (raised by the moment evaluator).
    """
    powers = normalize_powers(powers)
    if not any(q >= 2 for q in powers):
        raise DomainError("the structure fit needs at least one p_q with q >= 2")
    if oversampling < 2:
        raise DomainError(f"oversampling must be at least 2, got {oversampling}")
    precision = resolve_precision(precision)
    degree = inverse_degree(powers)
    order = sum((q - 1) * count for q, count in powers.items())
    unknowns = (order + 1) * degree
    size = oversampling * unknowns
    with mp.workprec(precision):
        coarse, residual = _solve(n, a, b, powers, _grid(size, t_range), degree, order, precision)
        fine, _ = _solve(n, a, b, powers, _grid(2 * size, t_range), degree, order, precision)
        scale = max(abs(c) for c in fine) or mpf(1)
        drift = max(abs(x - y) for x, y in zip(coarse, fine, strict=True)) / scale
        coefficients = tuple(
            tuple(coarse[m * degree + d] for d in range(degree)) for m in range(order + 1)
        )
    logger.info(
        "structure fit finished",
        extra={
            "event": "structure_fit",
            "n": n,
            "a": str(a),
            "order": order,
            "residual": float(residual),
        },
    )
    return StructureFit(coefficients, residual, drift, size)
