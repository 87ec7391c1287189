"""e-expansions of the derivative ratios R_{N,k} and their hard-edge limits R_k.

With x_j = (1 - cos θ_j)/2 the ratio |φ^(k)(0)/φ(0)| of a characteristic
polynomial equals R_{N,k}(x) = k! [z^k] ∏_j Σ_n c_j(n) z^n / n! where
c_j(0) = c_j(1) = 1 and c_j(n) = 1 + (2^n - 2)/(4 x_j).
"""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial, prod

import sympy

from app.combinatorics.epoly import N_SYMBOL, EPolynomial
from app.combinatorics.partitions import partitions, partitions_parts_le2
from app.core.errors import DomainError


@lru_cache(maxsize=32)
def rk_limit_expansion(k: int) -> EPolynomial:
    """R_k = Σ_{μ ∈ P_k^(2)} 2^(-2θ) k!/(l - θ)! e_θ."""
    if k < 0:
        raise DomainError(f"derivative order must be >= 0, got {k}")
    terms: dict[tuple[int, ...], sympy.Expr] = {}
    for mu in partitions_parts_le2(k):
        theta, length = mu.theta, mu.length
        coeff = sympy.Rational(factorial(k), 4**theta * factorial(length - theta))
        key = (theta,) if theta else ()
        terms[key] = terms.get(key, 0) + coeff
    return EPolynomial(terms)


def _finite_terms(k: int, n: sympy.Expr) -> dict[tuple[int, ...], sympy.Expr]:
    terms: dict[tuple[int, ...], sympy.Expr] = {}
    for mu in partitions(k):
        length = mu.length
        assignments = sympy.Rational(
            factorial(k), prod(factorial(p) for p in mu.parts)
        ) / prod(factorial(m) for m in mu.multiplicities.values())
        big = [p for p in mu.parts if p >= 2]
        for size in range(len(big) + 1):
            for chosen in combinations(big, size):
                c = prod((sympy.Rational(2**p - 2, 4) for p in chosen), start=sympy.Integer(1))
                falling = sympy.ff(n - size, length - size)
                coeff = assignments * c * factorial(size) * falling
                key = (size,) if size else ()
                terms[key] = terms.get(key, 0) + coeff
    return terms


@lru_cache(maxsize=128)
def rnk_finite_expansion(k: int, n: int | None = None) -> EPolynomial:
    """Exact e-expansion of R_{N,k}; symbolic in N when *n* is None.

    Raises:
        DomainError: If a concrete *n* is smaller than k.
    """
    if k < 0:
        raise DomainError(f"derivative order must be >= 0, got {k}")
    if n is not None and n < k:
        raise DomainError(f"R_(N,{k}) needs N >= {k}, got N={n}")
    size = N_SYMBOL if n is None else sympy.Integer(n)
    return EPolynomial(_finite_terms(k, size))


def rnk_direct(k: int, points: Sequence[Fraction | int]) -> Fraction:
    """R_{N,k} at concrete points by the multinomial generating product."""
    poly = [Fraction(1)] + [Fraction(0)] * k
    for x in points:
        x = Fraction(x)
        if x <= 0:
            raise DomainError("points must be positive")
        factor = [Fraction(1, factorial(n)) for n in range(k + 1)]
        for n in range(2, k + 1):
            factor[n] *= 1 + Fraction(2**n - 2, 4) / x
        poly = [sum(poly[i] * factor[d - i] for i in range(d + 1)) for d in range(k + 1)]
    return factorial(k) * poly[k]
