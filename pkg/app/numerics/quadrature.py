"""Gauss quadrature rules.

Extended-precision Gauss–Jacobi rules on [0, 1] for the Beta-type
integrals of the exact paths, and binary64 rules (Legendre on an
interval, the half line, and a square-root map) for Nyström
discretizations of Fredholm determinants.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from mpmath import mp, mpf

from app.core.errors import ConvergenceError, DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class QuadratureRule:
    """Nodes x_i in (0, 1) and weights for ∫₀¹ f(x) x^alpha (1-x)^beta dx."""

    nodes: tuple[mpf, ...]
    weights: tuple[mpf, ...]
    alpha: mpf
    beta: mpf
    precision_bits: int

    def __len__(self) -> int:
        return len(self.nodes)

    def integrate(self, f: Callable[[mpf], mpf]) -> mpf:
        return mp.fsum(w * f(x) for x, w in zip(self.nodes, self.weights))


@dataclass(frozen=True, slots=True)
class FloatRule:
    """A binary64 rule: ∫ f(x) dx ≈ Σ w_i f(x_i)."""

    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return int(self.nodes.shape[0])


# ---------------------------------------------------------------------------
# Gauss–Jacobi at extended precision
# ---------------------------------------------------------------------------

_GUARD_BITS = 24


@lru_cache(maxsize=64)
def gauss_jacobi_rule(n: int, alpha, beta, precision: int) -> QuadratureRule:
    """n-point rule for ∫₀¹ f(x) x^alpha (1-x)^beta dx at *precision* bits.

    Built by ``mp.gauss_quadrature`` (Golub–Welsch on the Jacobi matrix)
    for (1-y)^beta (1+y)^alpha on [-1, 1] and mapped by x = (1 + y)/2.
    The weights sum to B(alpha+1, beta+1).

    Raises:
        DomainError: If ``n < 1`` or an exponent is ``<= -1``.
    """
    if n < 1:
        raise DomainError(f"quadrature needs at least one node, got {n}")
    with mp.workprec(precision + _GUARD_BITS):
        p, q = mpf(alpha), mpf(beta)
        if p <= -1 or q <= -1:
            raise DomainError(f"Jacobi exponents must exceed -1, got ({p}, {q})")
        ys, ws = mp.gauss_quadrature(n, "jacobi", q, p)
        scale = mp.power(2, p + q + 1)
        pairs = sorted(((1 + ys[i]) / 2, ws[i] / scale) for i in range(n))
    logger.debug(
        "Gauss-Jacobi rule built",
        extra={"event": "quadrature_rule", "nodes": n, "precision_bits": precision},
    )
    with mp.workprec(precision):
        return QuadratureRule(
            nodes=tuple(+x for x, _ in pairs),
            weights=tuple(+w for _, w in pairs),
            alpha=+p,
            beta=+q,
            precision_bits=precision,
        )


def integrate_jacobi(
    f: Callable[[mpf], mpf],
    alpha,
    beta,
    precision: int,
    *,
    start: int = 16,
    max_nodes: int = 512,
    tolerance: mpf | None = None,
) -> tuple[mpf, int]:
    """Adaptive ∫₀¹ f(x) x^alpha (1-x)^beta dx by node doubling.

    Returns:
        ``(value, nodes)`` of the first rule whose value agrees with the
        previous one to relative *tolerance* (default 2^(-precision/2)).

    Raises:
        ConvergenceError: If *max_nodes* is reached first.
    """
    with mp.workprec(precision):
        tol = mp.ldexp(1, -precision // 2) if tolerance is None else mpf(tolerance)
        n = start
        previous = gauss_jacobi_rule(n, alpha, beta, precision).integrate(f)
        while n < max_nodes:
            n *= 2
            current = gauss_jacobi_rule(n, alpha, beta, precision).integrate(f)
            if abs(current - previous) <= tol * abs(current):
                return current, n
            previous = current
    raise ConvergenceError(
        f"Gauss-Jacobi quadrature did not converge with {max_nodes} nodes "
        f"(alpha={alpha}, beta={beta})"
    )


# ---------------------------------------------------------------------------
# Binary64 rules for Nyström discretizations
# ---------------------------------------------------------------------------


def gauss_legendre_rule(n: int, lower: float = -1.0, upper: float = 1.0) -> FloatRule:
    """n-point Gauss–Legendre rule on [lower, upper]."""
    if n < 1:
        raise DomainError(f"quadrature needs at least one node, got {n}")
    y, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (upper - lower)
    return FloatRule(nodes=lower + half * (y + 1.0), weights=half * w)


def half_line_rule(n: int) -> FloatRule:
    """Rule on (0, ∞) through x = u/(1-u), Gauss–Legendre in u ∈ (0, 1)."""
    base = gauss_legendre_rule(n, 0.0, 1.0)
    u = base.nodes
    return FloatRule(nodes=u / (1.0 - u), weights=base.weights / (1.0 - u) ** 2)


def sqrt_truncated_rule(n: int, cutoff: float) -> FloatRule:
    """Rule on (0, cutoff) through x = s², Gauss–Legendre in s ∈ (0, √cutoff).

    Kernels built from Bessel functions of √x are smooth in s.
    """
    if cutoff <= 0:
        raise DomainError(f"cutoff must be positive, got {cutoff}")
    base = gauss_legendre_rule(n, 0.0, float(np.sqrt(cutoff)))
    s = base.nodes
    return FloatRule(nodes=s * s, weights=2.0 * s * base.weights)
