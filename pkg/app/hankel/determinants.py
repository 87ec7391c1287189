"""Base and partition-shifted Hankel determinants and their exact t-derivatives.

Φ_{N,λ}(t) = det[g_{i+j+λ_{N-j}}(t)]_{i,j=0}^{N-1}; Φ_N = Φ_{N,∅}. Many
determinants share all but a few columns with the base matrix B, so
they are evaluated as det(B)·det((B⁻¹V)_{S,S}) from one factorization
of B, where V holds the replacement columns and S their positions.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field

from mpmath import mp, mpf

from app.combinatorics.partitions import EMPTY, Partition, multinomial
from app.core.config import get_settings
from app.core.errors import DomainError, PrecisionError
from app.hankel.entries import EntryMethod, g_entries, validate_entry_range
from app.numerics.linalg import LUSystem, balance_symmetric, det_checked, det_ext
from app.numerics.precision import resolve_precision

logger = logging.getLogger(__name__)


def working_bits(precision: int, n: int) -> int:
    """Precision plus the per-row guard bits used inside eliminations."""
    return precision + get_settings().GUARD_BITS_PER_N * n


@dataclass(frozen=True, slots=True)
class HankelSpec:
    n: int
    a: mpf
    b: mpf
    shift: Partition = EMPTY
    t: mpf = field(default_factory=lambda: mpf(0))
    precision_bits: int | None = None

    def __post_init__(self) -> None:
        for name in ("a", "b", "t"):
            object.__setattr__(self, name, mpf(getattr(self, name)))
        object.__setattr__(self, "precision_bits", resolve_precision(self.precision_bits))
        if self.shift.length > self.n:
            raise DomainError(f"shift {self.shift} has more than N={self.n} rows")
        validate_entry_range(self.n, self.a, self.b, 2 * self.n - 2 + self.shift.part(1), self.t)

    def column_shifts(self) -> tuple[int, ...]:
        """Column j is shifted by λ_{N-j}."""
        return tuple(self.shift.part(self.n - j) for j in range(self.n))


# ---------------------------------------------------------------------------
# Shared factorization
# ---------------------------------------------------------------------------


class HankelSystem:
    """Base Hankel matrix B of one (N, a, b, t), factored once.

    Must be used inside an ``mp.workprec`` block of at least the bits it
    was built with.
    """

    def __init__(self, n: int, entries: list[mpf]) -> None:
        if len(entries) < 2 * n - 1:
            raise DomainError("not enough entries for the base Hankel matrix")
        self.n = n
        self.entries = entries
        base = mp.matrix([[entries[i + j] for j in range(n)] for i in range(n)])
        scaled, self._exps = balance_symmetric(base)
        self._lu = LUSystem(scaled)
        if self._lu.singular:
            raise PrecisionError(f"base Hankel matrix is singular at {mp.prec} bits (N={n})")
        self._solved: dict[int, list[mpf]] = {}

    def det(self) -> mpf:
        return mp.ldexp(self._lu.det(), 2 * sum(self._exps))

    def column(self, c: int) -> list[mpf]:
        """B⁻¹ v_c with v_c = (g_{c+i})_i; exactly e_c for c < N."""
        if c in self._solved:
            return self._solved[c]
        if c < self.n:
            self._solved[c] = [mpf(1) if i == c else mpf(0) for i in range(self.n)]
        else:
            if c + self.n - 1 >= len(self.entries):
                raise DomainError(f"entry g_{c + self.n - 1} was not precomputed")
            rhs = [mp.ldexp(self.entries[c + i], -self._exps[i]) for i in range(self.n)]
            z = self._lu.solve(rhs)
            self._solved[c] = [mp.ldexp(z[i], -self._exps[i]) for i in range(self.n)]
        return self._solved[c]

    def replacement_ratio(self, targets: Mapping[int, int]) -> mpf:
        """det(B with column j → v_{targets[j]}) / det(B).

        Positions mapped to themselves are ignored. A target equal to an
        unmoved position gives a zero column in the minor and ratio 0.
        """
        moved = sorted(j for j, c in targets.items() if c != j)
        if not moved:
            return mpf(1)
        cols = [self.column(targets[j]) for j in moved]
        small = [[cols[q][p] for q in range(len(moved))] for p in moved]
        return det_ext(small)


def hankel_system(
    n: int, a, b, t, extra: int, bits: int, method: EntryMethod | None = None
) -> HankelSystem:
    entries = g_entries(n, a, b, t, 2 * n - 2 + extra, precision=bits, method=method)
    return HankelSystem(n, entries)


# ---------------------------------------------------------------------------
# Determinants
# ---------------------------------------------------------------------------


def hankel_det(spec: HankelSpec, *, check: bool = False, method: EntryMethod | None = None) -> mpf:
    """Φ_{N,λ}(t) at ``spec.precision_bits``.

    Args:
        check: Re-evaluate at doubled precision and raise on sign or
            magnitude instability.

    Raises:
        PrecisionError: When *check* detects an unstable value.
    """
    n = spec.n
    precision = spec.precision_bits
    bits = working_bits(precision, n)
    shifts = spec.column_shifts()
    with mp.workprec(bits):
        entries = g_entries(
            n, spec.a, spec.b, spec.t, 2 * n - 2 + spec.shift.part(1), precision=bits, method=method
        )
        matrix = [[entries[i + j + shifts[j]] for j in range(n)] for i in range(n)]
        value = det_checked(matrix) if check else det_ext(matrix)
    with mp.workprec(precision):
        return +value


def _allocations(total: int, slots: int) -> Iterator[tuple[int, ...]]:
    if slots == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for tail in _allocations(total - first, slots - 1):
            yield (first,) + tail


def derivative_ratios(system: HankelSystem, order: int) -> mpf:
    """Φ^(order)/Φ by distributing the derivative over rows."""
    n = system.n
    sign = -1 if order % 2 else 1
    terms = []
    for alloc in sorted(_allocations(order, n)):
        weight = multinomial(alloc)
        ratio = system.replacement_ratio({i: i + s for i, s in enumerate(alloc)})
        terms.append(weight * ratio)
    return sign * mp.fsum(terms)


def hankel_t_derivs(
    spec: HankelSpec, order: int, *, method: EntryMethod | None = None
) -> list[mpf]:
    """[Φ_N(t), Φ_N'(t), …, Φ_N^(order)(t)] from dg_m/dt = -g_{m+1}.

    Raises:
        DomainError: If *spec* carries a shift or ``order >= a + 1``.
    """
    if spec.shift.parts:
        raise DomainError("t-derivatives are provided for the unshifted determinant only")
    if order < 0:
        raise DomainError(f"derivative order must be >= 0, got {order}")
    values, _ = _t_derivs_unrounded(spec, order, method)
    with mp.workprec(spec.precision_bits):
        return [+v for v in values]


def _t_derivs_unrounded(
    spec: HankelSpec, order: int, method: EntryMethod | None = None
) -> tuple[list[mpf], int]:
    """Derivatives at the working precision, with that precision."""
    n = spec.n
    validate_entry_range(n, spec.a, spec.b, 2 * n - 2 + order, spec.t)
    bits = working_bits(spec.precision_bits, n)
    with mp.workprec(bits):
        system = hankel_system(n, spec.a, spec.b, spec.t, order, bits, method)
        base = system.det()
        values = [base] + [base * derivative_ratios(system, m) for m in range(1, order + 1)]
    return values, bits


def hankel_first_derivative_trace(spec: HankelSpec, *, method: EntryMethod | None = None) -> mpf:
    """Φ_N' by Jacobi's formula det(B)·tr(B⁻¹B'), with B'_ij = -g_{i+j+1}.

    Uses a separate LU solve per column, independent of :class:`HankelSystem`.
    """
    n = spec.n
    validate_entry_range(n, spec.a, spec.b, 2 * n - 1, spec.t)
    bits = working_bits(spec.precision_bits, n)
    with mp.workprec(bits):
        g = g_entries(n, spec.a, spec.b, spec.t, 2 * n - 1, precision=bits, method=method)
        base = mp.matrix([[g[i + j] for j in range(n)] for i in range(n)])
        trace = mpf(0)
        for j in range(n):
            column = mp.matrix([-g[i + j + 1] for i in range(n)])
            trace += mp.lu_solve(base, column)[j]
        value = det_ext(base) * trace
    with mp.workprec(spec.precision_bits):
        return +value


def sigma_n(n: int, a, b, t, *, precision: int | None = None) -> mpf:
    """σ_N(t) = t Φ_N'(t)/Φ_N(t)."""
    spec = HankelSpec(n, a, b, t=t, precision_bits=precision)
    phi, d1 = hankel_t_derivs(spec, 1)
    if phi == 0:
        raise PrecisionError("Φ_N vanished; raise the precision")
    with mp.workprec(spec.precision_bits):
        return spec.t * d1 / phi


@dataclass(frozen=True, slots=True)
class SigmaJet:
    sigma: mpf
    d1: mpf
    d2: mpf


def sigma_jet(n: int, a, b, t, *, precision: int | None = None) -> SigmaJet:
    """(σ, σ', σ'') at t from exact Φ, Φ', Φ'', Φ'''."""
    spec = HankelSpec(n, a, b, t=t, precision_bits=precision)
    (phi, p1, p2, p3), bits = _t_derivs_unrounded(spec, 3)
    if phi == 0:
        raise PrecisionError("Φ_N vanished; raise the precision")
    with mp.workprec(bits):
        t = spec.t
        l1 = p1 / phi
        l2 = p2 / phi - l1**2
        l3 = p3 / phi - 3 * p2 * p1 / phi**2 + 2 * l1**3
        sigma, d1, d2 = t * l1, l1 + t * l2, 2 * l2 + t * l3
    with mp.workprec(spec.precision_bits):
        return SigmaJet(sigma=+sigma, d1=+d1, d2=+d2)
