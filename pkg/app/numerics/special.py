"""Log-Gamma, log-Barnes-G and Pochhammer symbols on ExtReal arguments."""

from __future__ import annotations

from mpmath import mp, mpf

from app.core.errors import DomainError


def log_gamma(x) -> mpf:
    """ln Γ(x) for real x > 0.

    Raises:
        DomainError: If ``x <= 0``.
    """
    x = mpf(x)
    if x <= 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return mp.loggamma(x)


def log_barnes_g(x) -> mpf:
    """ln G(x) for real x > 0, with G(1) = G(2) = 1.

    The argument is reduced to (1, 2] with G(x+1) = Γ(x)G(x) before
    calling mpmath's Barnes G, so large arguments stay cheap.
    """
    x = mpf(x)
    if x <= 0:
        raise DomainError(f"log_barnes_g requires x > 0, got {x}")
    acc = mpf(0)
    while x > 2:
        x -= 1
        acc += mp.loggamma(x)
    while x <= 1:
        # G(x) = G(x+1) / Γ(x)
        acc -= mp.loggamma(x)
        x += 1
    return acc + mp.log(mp.barnesg(x))


def rising(x, k: int) -> mpf:
    """Pochhammer symbol (x)_k = x(x+1)...(x+k-1)."""
    if k < 0:
        raise DomainError(f"rising factorial order must be >= 0, got {k}")
    return mp.rf(mpf(x), k)


def log_beta(a, b) -> mpf:
    """ln B(a, b) for a, b > 0."""
    return log_gamma(a) + log_gamma(b) - log_gamma(mpf(a) + mpf(b))
