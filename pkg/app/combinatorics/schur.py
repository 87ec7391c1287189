"""Schur-basis expansions in a fixed number of variables, built by the Pieri rule."""

from __future__ import annotations

from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from app.combinatorics.partitions import EMPTY, Partition
from app.core.errors import DomainError


@dataclass(frozen=True)
class SchurExpansion:
    """Σ c_λ s_λ(x_1, …, x_n) with exact rational coefficients."""

    n_vars: int
    terms: dict[Partition, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n_vars < 1:
            raise DomainError(f"need at least one variable, got {self.n_vars}")
        cleaned = {
            lam: Fraction(c)
            for lam, c in self.terms.items()
            if c and lam.length <= self.n_vars
        }
        object.__setattr__(self, "terms", cleaned)

    @classmethod
    def one(cls, n_vars: int) -> SchurExpansion:
        return cls(n_vars, {EMPTY: Fraction(1)})

    def __iter__(self) -> Iterator[tuple[Partition, Fraction]]:
        return iter(sorted(self.terms.items(), reverse=True))

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: SchurExpansion) -> SchurExpansion:
        if other.n_vars != self.n_vars:
            raise DomainError("cannot add expansions in different numbers of variables")
        merged = dict(self.terms)
        for lam, c in other.terms.items():
            merged[lam] = merged.get(lam, Fraction(0)) + c
        return SchurExpansion(self.n_vars, merged)

    def scaled(self, factor: Fraction | int) -> SchurExpansion:
        return SchurExpansion(self.n_vars, {lam: c * factor for lam, c in self.terms.items()})

    def as_mapping(self) -> Mapping[Partition, Fraction]:
        return dict(self.terms)


def _vertical_strips(rows: tuple[int, ...], k: int) -> Iterator[tuple[int, ...]]:
    """Partitions obtained from *rows* (padded) by adding a vertical k-strip.

    Inside a block of equal rows only the top c rows may grow; blocks are
    independent of each other.
    """
    blocks: list[tuple[int, int]] = []
    start = 0
    for i in range(1, len(rows) + 1):
        if i == len(rows) or rows[i] != rows[start]:
            blocks.append((start, i - start))
            start = i

    def _choose(b: int, left: int) -> Iterator[list[int]]:
        if b == len(blocks):
            if left == 0:
                yield []
            return
        size = blocks[b][1]
        capacity = sum(s for _, s in blocks[b + 1:])
        for c in range(min(size, left), -1, -1):
            if left - c > capacity:
                break
            for rest in _choose(b + 1, left - c):
                yield [c] + rest

    for counts in _choose(0, k):
        new = list(rows)
        for (begin, _), c in zip(blocks, counts):
            for i in range(begin, begin + c):
                new[i] += 1
        yield tuple(new)


def pieri_e_multiply(expansion: SchurExpansion, k: int) -> SchurExpansion:
    """Multiply by e_k: each s_λ becomes Σ s_μ over vertical k-strips μ/λ.

    Raises:
        DomainError: If k is negative or exceeds the number of variables.
    """
    n = expansion.n_vars
    if k < 0 or k > n:
        raise DomainError(f"e_{k} is out of range for {n} variables")
    if k == 0:
        return expansion
    out: dict[Partition, Fraction] = {}
    for lam, c in expansion.terms.items():
        for rows in _vertical_strips(lam.padded(n), k):
            mu = Partition.of(*rows)
            out[mu] = out.get(mu, Fraction(0)) + c
    return SchurExpansion(n, out)


@lru_cache(maxsize=512)
def expand_e_product(indices: tuple[int, ...], n_vars: int) -> SchurExpansion:
    """Schur expansion of ∏ e_k(x_1, …, x_n) over *indices*.

    Indices outside 0..n make the product vanish.
    """
    if any(k < 0 or k > n_vars for k in indices):
        return SchurExpansion(n_vars)
    result = SchurExpansion.one(n_vars)
    for k in sorted(indices, reverse=True):
        result = pieri_e_multiply(result, k)
    return result
