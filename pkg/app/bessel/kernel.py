"""The Bessel kernel K_a(x, y) of the hard-edge point process.

Off the diagonal

    K_a(x, y) = (√x J_{a+1}(√x) J_a(√y) - √y J_{a+1}(√y) J_a(√x)) / (2(x - y)),

on it ¼(J_a(√x)² - J_{a+1}(√x) J_{a-1}(√x)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpf
from scipy import integrate, special

from app.core.errors import DomainError
from app.numerics.precision import ExtReal, resolve_precision

# Relative gap below which a pair is treated as diagonal in binary64.
_DIAGONAL_GAP = 1e-9


@dataclass(frozen=True, slots=True)
class BesselKernelSpec:
    a: mpf

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", mpf(self.a))
        if self.a <= -1:
            raise DomainError(f"the Bessel kernel needs a > -1, got a={self.a}")


def bessel_kernel(spec: BesselKernelSpec, x, y, *, precision: int | None = None) -> ExtReal:
    """K_a(x, y) at working precision."""
    precision = resolve_precision(precision)
    with mp.workprec(precision + 16):
        a, x, y = spec.a, mpf(x), mpf(y)
        if x <= 0 or y <= 0:
            raise DomainError("the Bessel kernel is evaluated at positive arguments")
        rx, ry = mp.sqrt(x), mp.sqrt(y)
        if x == y:
            value = (mp.besselj(a, rx) ** 2 - mp.besselj(a + 1, rx) * mp.besselj(a - 1, rx)) / 4
        else:
            value = (
                rx * mp.besselj(a + 1, rx) * mp.besselj(a, ry)
                - ry * mp.besselj(a + 1, ry) * mp.besselj(a, rx)
            ) / (2 * (x - y))
    return ExtReal.of(value, precision)


class BesselKernel:
    """Vectorized binary64 K_a for Nyström assembly; broadcasts like numpy."""

    def __init__(self, a: float) -> None:
        if a <= -1:
            raise DomainError(f"the Bessel kernel needs a > -1, got a={a}")
        self.a = float(a)

    def diagonal(self, x: np.ndarray) -> np.ndarray:
        r = np.sqrt(np.asarray(x, dtype=float))
        a = self.a
        return 0.25 * (special.jv(a, r) ** 2 - special.jv(a + 1, r) * special.jv(a - 1, r))

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        rx, ry = np.sqrt(x), np.sqrt(y)
        a = self.a
        jx, jy = special.jv(a, rx), special.jv(a, ry)
        num = rx * special.jv(a + 1, rx) * jy - ry * special.jv(a + 1, ry) * jx
        gap = x - y
        close = np.abs(gap) <= _DIAGONAL_GAP * np.maximum(np.abs(x), np.abs(y))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = num / (2.0 * gap)
        if np.any(close):
            out = np.where(close, self.diagonal(0.5 * (x + y)), out)
        return out

    def inverse_density_integral(self, cutoff: float) -> float:
        """∫_0^cutoff K(x, x)/x dx, integrated in s = √x."""
        if self.a <= 0:
            raise DomainError(f"∫ K(x,x)/x dx diverges at 0 unless a > 0, got a={self.a}")

        def integrand(s: float) -> float:
            return float(self.diagonal(np.array(s * s))) * 2.0 / s

        value, _ = integrate.quad(integrand, 0.0, float(np.sqrt(cutoff)), limit=400)
        return value


def leading_tail(cutoff: float) -> float:
    """∫_X^∞ x^(-1)/(2π√x) dx from the bulk density K(x,x) ~ 1/(2π√x)."""
    return 1.0 / (np.pi * np.sqrt(cutoff))


def inverse_density_total(a: float, cutoff: float) -> float:
    """∫_0^∞ K(x,x)/x dx with the leading tail beyond *cutoff* (equals 1/(4a))."""
    return BesselKernel(a).inverse_density_integral(cutoff) + leading_tail(cutoff)
