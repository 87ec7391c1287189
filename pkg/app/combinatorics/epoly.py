"""Polynomials in the elementary symmetric values e_1, e_2, … of inverse points.

Monomials are sorted tuples of e-indices (repetition = power); e_0 is
the constant 1 and never stored. Coefficients are sympy expressions so
that they may carry the matrix size N symbolically.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import sympy
from mpmath import mpf

from app.core.errors import DomainError

N_SYMBOL = sympy.Symbol("N", integer=True, positive=True)

Monomial = tuple[int, ...]


def _normalize(terms: Mapping[Monomial, object]) -> dict[Monomial, sympy.Expr]:
    out: dict[Monomial, sympy.Expr] = {}
    for key, coeff in terms.items():
        mono = tuple(sorted(k for k in key if k != 0))
        if any(k < 0 for k in mono):
            raise DomainError(f"e-indices must be non-negative, got {key}")
        value = sympy.expand(out.get(mono, sympy.Integer(0)) + sympy.sympify(coeff))
        out[mono] = value
    return {k: v for k, v in out.items() if v != 0}


@dataclass(frozen=True)
class EPolynomial:
    """Finite linear combination of e-monomials."""

    terms: dict[Monomial, sympy.Expr] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", _normalize(self.terms))

    @classmethod
    def constant(cls, value: object = 1) -> EPolynomial:
        return cls({(): value})

    @classmethod
    def e(cls, k: int) -> EPolynomial:
        return cls({(k,): 1})

    @classmethod
    def monomial(cls, indices: Iterable[int], coeff: object = 1) -> EPolynomial:
        return cls({tuple(indices): coeff})

    def __iter__(self) -> Iterator[tuple[Monomial, sympy.Expr]]:
        return iter(sorted(self.terms.items()))

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.terms.items())))

    def __add__(self, other: EPolynomial) -> EPolynomial:
        merged = dict(self.terms)
        for key, coeff in other.terms.items():
            merged[key] = merged.get(key, 0) + coeff
        return EPolynomial(merged)

    def __mul__(self, other: EPolynomial | int | Fraction) -> EPolynomial:
        if not isinstance(other, EPolynomial):
            return EPolynomial({k: v * sympy.sympify(other) for k, v in self.terms.items()})
        product: dict[Monomial, sympy.Expr] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key = tuple(sorted(k1 + k2))
                product[key] = product.get(key, 0) + c1 * c2
        return EPolynomial(product)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> EPolynomial:
        if exponent < 0:
            raise DomainError("EPolynomial powers must be non-negative")
        result = EPolynomial.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def subs(self, **values: object) -> EPolynomial:
        """Substitute symbols by name, e.g. ``poly.subs(N=5)``."""
        mapping = {sympy.Symbol(name, integer=True, positive=True): v for name, v in values.items()}
        return EPolynomial({k: c.subs(mapping) for k, c in self.terms.items()})

    def scale_generators(self, factor: object) -> EPolynomial:
        """Replace every e_h by factor^h · e_h."""
        factor = sympy.sympify(factor)
        return EPolynomial({k: c * factor ** sum(k) for k, c in self.terms.items()})

    @property
    def max_factors(self) -> int:
        """Largest number of e-factors in one monomial (the inverse degree)."""
        return max((len(k) for k in self.terms), default=0)

    @property
    def is_concrete(self) -> bool:
        return all(not c.free_symbols for c in self.terms.values())

    def coefficient(self, *indices: int) -> sympy.Expr:
        return self.terms.get(tuple(sorted(indices)), sympy.Integer(0))

    def evaluate_inverse(self, points: Iterable[Fraction | int]) -> sympy.Rational:
        """Exact value with e_h = e_h(1/x_1, …, 1/x_n) and N = n."""
        xs = [sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in points]
        inv = [1 / x for x in xs]
        es = [elementary(inv, h) for h in range(len(inv) + 1)]
        total = sympy.Integer(0)
        for key, coeff in self.terms.items():
            value = coeff.subs(N_SYMBOL, len(xs))
            for h in key:
                value *= es[h] if h < len(es) else 0
            total += value
        return total


def elementary(values: list, h: int):
    """e_h of *values*."""
    if h == 0:
        return sympy.Integer(1)
    total = sympy.Integer(0)
    for combo in combinations(values, h):
        term = sympy.Integer(1)
        for v in combo:
            term *= v
        total += term
    return total


def coefficient_to_mpf(coeff: sympy.Expr) -> mpf:
    """Convert a concrete rational coefficient to mpf at the current precision."""
    if coeff.free_symbols:
        raise DomainError(f"coefficient {coeff} still depends on {coeff.free_symbols}")
    rational = sympy.Rational(coeff)
    return mpf(int(rational.p)) / int(rational.q)
