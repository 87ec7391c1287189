"""Fredholm determinants det(I - K·m) by Nyström discretization.

Assembly and the log-determinant run in binary64 (numpy); the kernels
involved are smooth, so Gauss rules converge geometrically and node
doubling doubles as the error estimate.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpf

from app.core.errors import DomainError
from app.numerics.quadrature import FloatRule

logger = logging.getLogger(__name__)

Kernel = Callable[[np.ndarray, np.ndarray], np.ndarray]
Multiplier = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, slots=True)
class FredholmResult:
    """Determinant value with the last doubling increment as error estimate."""

    value: mpf
    nodes: int
    increment: float
    converged: bool


def fredholm_det(kernel: Kernel, multiplier: Multiplier, rule: FloatRule) -> mpf:
    """det(I - M) with M_ij = √(w_i m_i) K(x_i, x_j) √(w_j m_j).

    Raises:
        DomainError: If the multiplier is negative at some node.
    """
    x = rule.nodes
    m = np.asarray(multiplier(x), dtype=float)
    if np.any(m < 0):
        raise DomainError("Fredholm multiplier must be non-negative")
    root = np.sqrt(rule.weights * m)
    k = kernel(x[:, None], x[None, :])
    a = np.eye(len(x)) - root[:, None] * k * root[None, :]
    sign, logdet = np.linalg.slogdet(a)
    if sign == 0:
        return mpf(0)
    return mpf(float(sign)) * mp.exp(mpf(float(logdet)))


def fredholm_det_adaptive(
    kernel: Kernel,
    multiplier: Multiplier,
    rule_factory: Callable[[int], FloatRule],
    *,
    tolerance: float,
    start: int = 32,
    max_nodes: int = 1024,
) -> FredholmResult:
    """Double the node count until successive determinants agree.

    Non-convergence is reported through ``converged=False`` and a
    warning, not an exception; callers decide whether it is fatal.
    """
    n = start
    previous = fredholm_det(kernel, multiplier, rule_factory(n))
    increment = float("inf")
    while n < max_nodes:
        n *= 2
        current = fredholm_det(kernel, multiplier, rule_factory(n))
        increment = float(abs(current - previous))
        if increment <= tolerance * max(1.0, float(abs(current))):
            return FredholmResult(value=current, nodes=n, increment=increment, converged=True)
        previous = current
    logger.warning(
        "Fredholm determinant did not converge",
        extra={"event": "fredholm_not_converged", "nodes": n, "residual": increment},
    )
    return FredholmResult(value=previous, nodes=n, increment=increment, converged=False)
