"""Monte Carlo estimates of joint moments from Haar eigenangle draws."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import factorial

import numpy as np

from app.core.errors import DomainError
from app.ensembles.sampling import MCMCConfig, SampleBatch, sample_group_angles
from app.moments.specs import MomentSpec

logger = logging.getLogger(__name__)

MIN_SAMPLES = 100


@dataclass(frozen=True, slots=True)
class MonteCarloEstimate:
    estimate: float
    stderr: float
    batch: SampleBatch | None

    @property
    def samples(self) -> int:
        return 0 if self.batch is None else len(self.batch)


def derivative_ratios(x: np.ndarray, k: int) -> np.ndarray:
    """R_{N,k}(x) per row: k! [z^k] ∏_j Σ_n c_j(n) z^n / n!.

    c_j(0) = c_j(1) = 1 and c_j(n) = 1 + (2^n - 2)/(4 x_j).
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    poly = np.zeros((x.shape[0], k + 1))
    poly[:, 0] = 1.0
    inv_fact = np.array([1.0 / factorial(n) for n in range(k + 1)])
    for j in range(x.shape[1]):
        c = np.ones((x.shape[0], k + 1))
        for n in range(2, k + 1):
            c[:, n] += (2.0**n - 2.0) / (4.0 * x[:, j])
        factor = c * inv_fact
        out = np.zeros_like(poly)
        for d in range(k + 1):
            out[:, d] = np.einsum("ij,ij->i", poly[:, : d + 1], factor[:, d::-1])
        poly = out
    return factorial(k) * poly[:, k]


def moment_weights(spec: MomentSpec, angles: np.ndarray) -> np.ndarray:
    """∏_k |φ^(k)(0)|^(h_k) for each row of eigenangles."""
    angles = np.atleast_2d(angles)
    x = (1.0 - np.cos(angles)) / 2.0
    log_w = float(spec.s) * np.log(2.0 - 2.0 * np.cos(angles)).sum(axis=1)
    for k, h in spec.derivative_exponents.items():
        log_w += float(h) * np.log(derivative_ratios(x, k))
    return np.exp(log_w)


def joint_moment_mc(
    spec: MomentSpec,
    samples: int,
    seed: int,
    config: MCMCConfig | None = None,
) -> MonteCarloEstimate:
    """Estimate J_N(h) with a chain batch-means standard error.

    Raises:
        DomainError: If fewer than 100 samples are requested.
    """
    if samples < MIN_SAMPLES:
        raise DomainError(f"Monte Carlo needs at least {MIN_SAMPLES} samples, got {samples}")
    if spec.s == 0:
        return MonteCarloEstimate(estimate=1.0, stderr=0.0, batch=None)
    batch = sample_group_angles(spec.group, spec.n, samples, seed, config)
    estimate, stderr = batch.mean_and_stderr(moment_weights(spec, batch.draws))
    logger.info(
        "monte carlo moment",
        extra={
            "event": "joint_moment_mc",
            "group": spec.group,
            "n": spec.n,
            "acceptance_rate": round(batch.acceptance_rate, 3),
        },
    )
    return MonteCarloEstimate(estimate=estimate, stderr=stderr, batch=batch)
