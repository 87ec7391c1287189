"""E[e^(-t 𝔢_1(a))] as a Fredholm determinant of the Bessel kernel.

Under the hard-edge scaling 𝔢_1 = 4 Σ_j 1/x_j over the Bessel points, so
E[e^(-t 𝔢_1)] = det(I - K_a (1 - e^(-4t/x))) on (0, ∞). The Nyström
part covers (0, X); beyond X the determinant factorizes to leading order
into exp(-4t ∫_X^∞ K(x,x)/x dx).
"""

from __future__ import annotations

import dataclasses
import logging
import time
from functools import lru_cache

import numpy as np
from mpmath import mp, mpf

from app.bessel.kernel import BesselKernel, leading_tail
from app.core.config import get_settings
from app.core.errors import DomainError
from app.numerics.differences import five_point
from app.numerics.fredholm import FredholmResult, fredholm_det_adaptive
from app.numerics.quadrature import sqrt_truncated_rule

logger = logging.getLogger(__name__)


@lru_cache(maxsize=64)
def tail_integral(a: float, cutoff: float) -> float:
    """∫_X^∞ K_a(x,x)/x dx: exact complement of 1/(4a) when a > 0, bulk density otherwise."""
    if a > 0:
        return 0.25 / a - BesselKernel(a).inverse_density_integral(cutoff)
    return leading_tail(cutoff)


def laplace_e1(
    a,
    t,
    tolerance: float | None = None,
    *,
    cutoff: float | None = None,
    max_nodes: int | None = None,
) -> FredholmResult:
    """Laplace transform of 𝔢_1(a) at t >= 0.

    Non-convergence of the node doubling is flagged on the result
    (``converged=False``), not raised.

    Raises:
        DomainError: If ``a <= -1`` or ``t < 0``.
    """
    settings = get_settings()
    tolerance = settings.FREDHOLM_TOLERANCE if tolerance is None else tolerance
    cutoff = settings.FREDHOLM_CUTOFF if cutoff is None else cutoff
    max_nodes = settings.FREDHOLM_MAX_NODES if max_nodes is None else max_nodes
    a_f, t_f = float(a), float(t)
    if a_f <= -1:
        raise DomainError(f"the Bessel kernel needs a > -1, got a={a}")
    if t_f < 0:
        raise DomainError(f"the Laplace variable must be non-negative, got t={t}")
    if t_f == 0:
        return FredholmResult(value=mpf(1), nodes=0, increment=0.0, converged=True)

    started = time.perf_counter()
    kernel = BesselKernel(a_f)

    def multiplier(x: np.ndarray) -> np.ndarray:
        return -np.expm1(-4.0 * t_f / x)

    result = fredholm_det_adaptive(
        kernel,
        multiplier,
        lambda n: sqrt_truncated_rule(n, cutoff),
        tolerance=tolerance,
        max_nodes=max_nodes,
    )
    value = result.value * mp.exp(-4 * t_f * tail_integral(a_f, cutoff))
    logger.debug(
        "bessel laplace transform evaluated",
        extra={
            "event": "laplace_e1",
            "a": a_f,
            "t": t_f,
            "nodes": result.nodes,
            "residual": result.increment,
            "latency_ms": round((time.perf_counter() - started) * 1000, 1),
        },
    )
    return dataclasses.replace(result, value=value)


@dataclasses.dataclass(frozen=True, slots=True)
class TauJet:
    """τ(t) = t d/dt ln E[e^(-t 𝔢_1)] with its first two derivatives."""

    tau: mpf
    d1: mpf
    d2: mpf


def tau_jet(a, t, *, step: float = 0.05, tolerance: float | None = None) -> TauJet:
    """τ, τ', τ'' from five-point differences of L(t) = ln E[e^(-t 𝔢_1(a))].

    τ' = L' + tL'' and τ'' = 2L'' + tL'''.
    """
    t = mpf(t)
    if t <= 0:
        raise DomainError("the τ-function jet needs t > 0")
    step = min(step, float(t) / 2)
    d = five_point(lambda u: mp.log(laplace_e1(a, u, tolerance).value), t, step)
    return TauJet(tau=t * d.d1, d1=d.d1 + t * d.d2, d2=2 * d.d2 + t * d.d3)
