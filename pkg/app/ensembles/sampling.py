"""Metropolis samplers for Jacobi/Laguerre eigenvalues and group eigenangles.

Many independent chains advance together as rows of one numpy array;
each sweep proposes a Gaussian move for one coordinate at a time in an
unconstrained variable (logit for Jacobi, log for Laguerre). Step sizes
adapt during burn-in toward the target acceptance and are frozen
afterwards, so recorded draws come from a fixed Markov kernel.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

from app.core.config import get_settings
from app.core.errors import DomainError
from app.ensembles.spec import EnsembleSpec, Group, group_shift

logger = logging.getLogger(__name__)

MIXING_BAND = (0.15, 0.6)


@dataclass(frozen=True, slots=True)
class MCMCConfig:
    chains: int = 1000
    burn_in: int = 400
    thinning: int = 2
    target_acceptance: float = 0.3

    def __post_init__(self) -> None:
        if self.chains < 2 or self.burn_in < 1 or self.thinning < 1:
            raise DomainError("MCMC needs >= 2 chains, burn_in >= 1 and thinning >= 1")
        if not 0 < self.target_acceptance < 1:
            raise DomainError("target acceptance must lie in (0, 1)")

    @classmethod
    def from_settings(cls) -> MCMCConfig:
        s = get_settings()
        return cls(chains=s.MC_CHAINS, burn_in=s.MC_BURN_IN, thinning=s.MC_THINNING)


@dataclass(frozen=True, slots=True)
class SampleBatch:
    """Recorded configurations, one sorted row per draw."""

    draws: np.ndarray
    seed: int
    acceptance_rate: float
    burn_in: int
    thinning: int
    chain_ids: np.ndarray = field(repr=False)
    mixing_ok: bool = True

    def __len__(self) -> int:
        return int(self.draws.shape[0])

    def mean_and_stderr(self, values: np.ndarray) -> tuple[float, float]:
        """Mean of per-draw *values* with a chain batch-means standard error."""
        values = np.asarray(values, dtype=float)
        chains = np.unique(self.chain_ids)
        if chains.size < 2:
            return float(values.mean()), float("nan")
        sums = np.bincount(self.chain_ids, weights=values)[chains]
        counts = np.bincount(self.chain_ids)[chains]
        chain_means = sums / counts
        stderr = chain_means.std(ddof=1) / np.sqrt(chains.size)
        return float(values.mean()), float(stderr)

    def to_csv(self, path: Path | str) -> Path:
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["draw", "chain"] + [f"x{j + 1}" for j in range(self.draws.shape[1])])
            for i, (row, chain) in enumerate(zip(self.draws, self.chain_ids)):
                writer.writerow([i, int(chain)] + [repr(float(v)) for v in row])
        return path


def _log_pair_terms(x: np.ndarray, j: int, xj: np.ndarray) -> np.ndarray:
    """2 Σ_{i≠j} ln|xj - x_i| per chain."""
    diffs = np.abs(xj[:, None] - np.delete(x, j, axis=1))
    return 2.0 * np.log(diffs).sum(axis=1)


def _to_x(family: str, y: np.ndarray) -> np.ndarray:
    return expit(y) if family == "jacobi" else np.exp(y)


def _log_single(family: str, y: np.ndarray, a: float, b: float) -> np.ndarray:
    """One-point log-density in y, Jacobian included."""
    if family == "jacobi":
        # ln x = -log(1 + e^-y), ln(1-x) = -log(1 + e^y)
        return -(a + 1.0) * np.logaddexp(0.0, -y) - (b + 1.0) * np.logaddexp(0.0, y)
    return (a + 1.0) * y - np.exp(y)


def _initial_state(spec: EnsembleSpec, chains: int, rng: np.random.Generator) -> np.ndarray:
    a = float(spec.a)
    if spec.family == "jacobi":
        x = rng.beta(a + 1.0, float(spec.b) + 1.0, size=(chains, spec.n))
        x = np.clip(x, 1e-12, 1 - 1e-12)
        return np.log(x) - np.log1p(-x)
    x = rng.gamma(a + 1.0 + spec.n, size=(chains, spec.n))
    return np.log(x)


def sample_ensemble(
    spec: EnsembleSpec,
    count: int,
    seed: int,
    config: MCMCConfig | None = None,
) -> SampleBatch:
    """Draw *count* configurations from the ensemble, deterministic under *seed*."""
    if count < 1:
        raise DomainError(f"sample count must be positive, got {count}")
    config = config or MCMCConfig.from_settings()
    rng = np.random.default_rng(seed)
    chains = min(config.chains, max(2, count))
    n = spec.n
    a = float(spec.a)
    b = float(spec.b) if spec.b is not None else 0.0

    y = _initial_state(spec, chains, rng)
    x = _to_x(spec.family, y)
    log_step = np.full(n, np.log(0.5 if spec.family == "jacobi" else 0.3))

    rounds = -(-count // chains)
    total_sweeps = config.burn_in + rounds * config.thinning
    recorded: list[np.ndarray] = []
    accepted = 0
    proposals = 0

    for sweep in range(total_sweeps):
        burning = sweep < config.burn_in
        for j in range(n):
            step = np.exp(log_step[j])
            y_new = y[:, j] + step * rng.standard_normal(chains)
            x_new = _to_x(spec.family, y_new)
            delta = (
                _log_single(spec.family, y_new, a, b)
                - _log_single(spec.family, y[:, j], a, b)
                + _log_pair_terms(x, j, x_new)
                - _log_pair_terms(x, j, x[:, j])
            )
            accept = np.log(rng.random(chains)) < delta
            y[accept, j] = y_new[accept]
            x[accept, j] = x_new[accept]
            rate = accept.mean()
            if burning:
                gain = 1.0 / (1.0 + sweep) ** 0.6
                log_step[j] += gain * (rate - config.target_acceptance)
            else:
                accepted += int(accept.sum())
                proposals += chains
        if not burning and (sweep - config.burn_in + 1) % config.thinning == 0:
            recorded.append(np.sort(x, axis=1))

    draws = np.concatenate(recorded, axis=0)[:count]
    chain_ids = np.tile(np.arange(chains), len(recorded))[:count]
    acceptance = accepted / proposals if proposals else 0.0
    mixing_ok = MIXING_BAND[0] <= acceptance <= MIXING_BAND[1]
    if not mixing_ok:
        logger.warning(
            "Metropolis acceptance outside the mixing band",
            extra={"event": "mcmc_mixing", "acceptance_rate": acceptance, "n": n},
        )
    logger.debug(
        "ensemble sampled",
        extra={"event": "mcmc_done", "n": n, "acceptance_rate": acceptance},
    )
    return SampleBatch(
        draws=draws,
        seed=seed,
        acceptance_rate=acceptance,
        burn_in=config.burn_in,
        thinning=config.thinning,
        chain_ids=chain_ids,
        mixing_ok=mixing_ok,
    )


def sample_jacobi(
    spec: EnsembleSpec, count: int, seed: int, config: MCMCConfig | None = None
) -> SampleBatch:
    """Jacobi draws in (0, 1)."""
    if spec.family != "jacobi":
        raise DomainError("sample_jacobi needs a Jacobi ensemble")
    return sample_ensemble(spec, count, seed, config)


def jacobi_to_angles(x: np.ndarray) -> np.ndarray:
    """θ = arccos(1 - 2x), inverse of x = (1 - cos θ)/2."""
    return np.arccos(1.0 - 2.0 * x)


def sample_group_angles(
    group: Group, n: int, count: int, seed: int, config: MCMCConfig | None = None
) -> SampleBatch:
    """Eigenangles in (0, π) of Haar-random USp(2N) or SO(2N) matrices."""
    shift = float(group_shift(group))
    batch = sample_jacobi(EnsembleSpec.jacobi(n, shift, shift), count, seed, config)
    return SampleBatch(
        draws=jacobi_to_angles(batch.draws),
        seed=batch.seed,
        acceptance_rate=batch.acceptance_rate,
        burn_in=batch.burn_in,
        thinning=batch.thinning,
        chain_ids=batch.chain_ids,
        mixing_ok=batch.mixing_ok,
    )
