"""Integer partitions and compositions."""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterator
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from app.core.errors import DomainError


@dataclass(frozen=True, slots=True, order=True)
class Partition:
    """A weakly decreasing tuple of positive integers."""

    parts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if any(p < 1 for p in self.parts):
            raise DomainError(f"partition parts must be positive, got {self.parts}")
        if any(x < y for x, y in zip(self.parts, self.parts[1:])):
            raise DomainError(f"partition parts must be weakly decreasing, got {self.parts}")

    @classmethod
    def of(cls, *parts: int) -> Partition:
        """Build from parts in any order; zeros are dropped."""
        return cls(tuple(sorted((p for p in parts if p), reverse=True)))

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def theta(self) -> int:
        """Number of parts equal to 2."""
        return self.parts.count(2)

    @property
    def multiplicities(self) -> dict[int, int]:
        return dict(Counter(self.parts))

    def part(self, i: int) -> int:
        """1-based part access, zero beyond the length."""
        if i < 1:
            raise DomainError(f"partition parts are 1-indexed, got {i}")
        return self.parts[i - 1] if i <= len(self.parts) else 0

    def padded(self, n: int) -> tuple[int, ...]:
        if len(self.parts) > n:
            raise DomainError(f"partition {self.parts} has more than {n} rows")
        return self.parts + (0,) * (n - len(self.parts))

    def conjugate(self) -> Partition:
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for p in self.parts if p > j) for j in range(self.parts[0])))

    def cells(self) -> Iterator[tuple[int, int]]:
        for i, p in enumerate(self.parts):
            for j in range(p):
                yield i, j

    def hook_content_dimension(self, n: int) -> Fraction:
        """s_λ(1, …, 1) with n ones, by the hook-content formula."""
        if len(self.parts) > n:
            return Fraction(0)
        conj = self.conjugate().parts
        value = Fraction(1)
        for i, j in self.cells():
            hook = (self.parts[i] - j) + (conj[j] - i) - 1
            value *= Fraction(n + j - i, hook)
        return value

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")" if self.parts else "∅"


EMPTY = Partition()


def partitions(k: int, max_part: int | None = None) -> Iterator[Partition]:
    """All partitions of k in reverse lexicographic order."""
    if k < 0:
        raise DomainError(f"cannot partition a negative integer, got {k}")
    top = k if max_part is None else min(k, max_part)

    def _gen(rest: int, bound: int) -> Iterator[tuple[int, ...]]:
        if rest == 0:
            yield ()
            return
        for first in range(min(rest, bound), 0, -1):
            for tail in _gen(rest - first, first):
                yield (first,) + tail

    for parts in _gen(k, top):
        yield Partition(parts)


def partitions_parts_le2(k: int) -> list[Partition]:
    """P_k^(2): partitions of k with every part equal to 1 or 2."""
    return list(partitions(k, max_part=2))


def multinomial(counts) -> int:
    counts = list(counts)
    value = factorial(sum(counts))
    for c in counts:
        value //= factorial(c)
    return value


def compositions_bounded(total: int, slots: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Weak compositions of *total* into *slots* parts, with multinomial coefficients."""
    if total < 0 or slots < 1:
        raise DomainError(f"need total >= 0 and slots >= 1, got ({total}, {slots})")

    def _gen(rest: int, width: int) -> Iterator[tuple[int, ...]]:
        if width == 1:
            yield (rest,)
            return
        for first in range(rest, -1, -1):
            for tail in _gen(rest - first, width - 1):
                yield (first,) + tail

    for comp in _gen(total, slots):
        yield comp, multinomial(comp)
