"""Moment specifications and group constants."""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf

from app.core.errors import DomainError
from app.ensembles.spec import GROUPS, Group, group_shift
from app.numerics.precision import ExtReal
from app.numerics.special import log_barnes_g, log_gamma


@dataclass(frozen=True, slots=True)
class MomentSpec:
    """E_G(N)[∏_k |φ^(k)(0)|^(h_k)] with h = (h_0, h_1, …, h_m), s = Σ h_k."""

    group: Group
    n: int
    h: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.group not in GROUPS:
            raise DomainError(f"unknown group {self.group!r}; expected one of {GROUPS}")
        if self.n < 1:
            raise DomainError(f"matrix size must be positive, got N={self.n}")
        h = tuple(self.h) or (0,)
        if any(v < 0 for v in h):
            raise DomainError(f"exponents must be non-negative, got {h}")
        object.__setattr__(self, "h", h)

    @property
    def s(self) -> mpf:
        return mp.fsum(mpf(v) for v in self.h)

    @property
    def derivative_exponents(self) -> dict[int, float]:
        """{k: h_k} for k >= 1 with non-zero exponent."""
        return {k: v for k, v in enumerate(self.h) if k >= 1 and v}

    @property
    def integer_derivatives(self) -> bool:
        return all(float(v).is_integer() for v in self.h[1:])

    @property
    def weighted_order(self) -> mpf:
        """Σ k h_k."""
        return mp.fsum(k * mpf(v) for k, v in enumerate(self.h))


@dataclass(frozen=True, slots=True)
class LeadingOrder:
    """Moment ~ coefficient · N^exponent as N → ∞."""

    exponent: mpf
    coefficient: ExtReal
    group: Group
    h: tuple[float, ...]


def bessel_parameter(group: Group, s) -> mpf:
    """Hard-edge parameter s ± 1/2 of the |φ(0)|^s-weighted law."""
    return mpf(s) + group_shift(group)


def group_exponent(group: Group, s) -> mpf:
    """s(s+1)/2 for USp, s(s-1)/2 for SO."""
    s = mpf(s)
    return s * (s + 2 * group_shift(group)) / 2


def log_group_prefactor(group: Group, s) -> mpf:
    """ln of the leading constant of E|φ(0)|^s.

    USp: 2^(s²/2) G(1+s) √Γ(1+s) / √(G(1+2s) Γ(1+2s));
    SO:  2^(s²/2) G(1+s) √Γ(1+2s) / √(G(1+2s) Γ(1+s)).
    """
    s = mpf(s)
    value = s**2 / 2 * mp.ln(2) + log_barnes_g(1 + s) - log_barnes_g(1 + 2 * s) / 2
    if group_shift(group) > 0:
        return value + log_gamma(1 + s) / 2 - log_gamma(1 + 2 * s) / 2
    return value + log_gamma(1 + 2 * s) / 2 - log_gamma(1 + s) / 2
