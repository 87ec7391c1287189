"""Ensemble and group identifiers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from mpmath import mpf

from app.core.errors import DomainError

Family = Literal["jacobi", "laguerre"]
Group = Literal["usp", "so"]

GROUPS: tuple[Group, ...] = ("usp", "so")


def group_shift(group: Group) -> mpf:
    """+1/2 for USp(2N), -1/2 for SO(2N): the Jacobi exponents of the eigenangle law."""
    if group == "usp":
        return mpf(1) / 2
    if group == "so":
        return -mpf(1) / 2
    raise DomainError(f"unknown group {group!r}; expected one of {GROUPS}")


@dataclass(frozen=True, slots=True)
class EnsembleSpec:
    """N points with weight x^a (1-x)^b on (0, 1) or x^a e^(-x) on (0, ∞)."""

    family: Family
    n: int
    a: mpf
    b: mpf | None = None

    def __post_init__(self) -> None:
        if self.family not in ("jacobi", "laguerre"):
            raise DomainError(f"unknown ensemble family {self.family!r}")
        if self.n < 1:
            raise DomainError(f"ensemble size must be positive, got N={self.n}")
        object.__setattr__(self, "a", mpf(self.a))
        if self.a <= -1:
            raise DomainError(f"ensemble parameter a must exceed -1, got a={self.a}")
        if self.family == "jacobi":
            if self.b is None:
                raise DomainError("the Jacobi ensemble needs a parameter b")
            object.__setattr__(self, "b", mpf(self.b))
            if self.b <= -1:
                raise DomainError(f"ensemble parameter b must exceed -1, got b={self.b}")
        elif self.b is not None:
            raise DomainError("the Laguerre ensemble takes no parameter b")

    @classmethod
    def jacobi(cls, n: int, a, b) -> EnsembleSpec:
        return cls("jacobi", n, a, b)

    @classmethod
    def laguerre(cls, n: int, a) -> EnsembleSpec:
        return cls("laguerre", n, a)

    @classmethod
    def for_group(cls, group: Group, n: int, s=0) -> EnsembleSpec:
        """Jacobi parameters (s ± 1/2, ±1/2) of the |φ(0)|^s-weighted eigenangle law."""
        shift = group_shift(group)
        return cls.jacobi(n, mpf(s) + shift, shift)

    def shifted(self, da=0) -> EnsembleSpec:
        """Same family and N with a replaced by a + da (validated)."""
        return EnsembleSpec(self.family, self.n, self.a + da, self.b)

    def resized(self, n: int) -> EnsembleSpec:
        return EnsembleSpec(self.family, n, self.a, self.b)
