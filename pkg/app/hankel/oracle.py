"""Brute-force tensor quadrature of small Jacobi averages.

Independent of the Hankel machinery: the N-fold integral of the
symmetrized density is evaluated directly on a Gauss–Jacobi product
grid. Only practical for N <= 3.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from itertools import combinations, product

from mpmath import mp, mpf

from app.core.errors import DomainError
from app.ensembles.averages import log_norm
from app.ensembles.spec import EnsembleSpec
from app.hankel.moments import inverse_degree, normalize_powers
from app.numerics.quadrature import gauss_jacobi_rule

MAX_ORACLE_N = 3


@dataclass(frozen=True, slots=True)
class OracleResult:
    value: mpf
    error_estimate: mpf
    nodes: int


def _tensor_sum(n: int, rule, t: mpf, powers: Mapping[int, int], degree: int) -> mpf:
    points = [(x, w * mp.exp(-t / x) * x**degree) for x, w in zip(rule.nodes, rule.weights)]
    terms = []
    for combo in product(points, repeat=n):
        xs = [x for x, _ in combo]
        weight = mpf(1)
        for _, w in combo:
            weight *= w
        vandermonde = mpf(1)
        for x, y in combinations(xs, 2):
            vandermonde *= (x - y) ** 2
        value = weight * vandermonde
        for q, count in powers.items():
            value *= mp.fsum(x ** (-q) for x in xs) ** count
        terms.append(value)
    return mp.fsum(terms)


def tensor_quadrature_moment(
    n: int,
    a,
    b,
    t,
    powers: Mapping[int, int] | None = None,
    *,
    nodes: int = 64,
    precision: int = 128,
) -> OracleResult:
    """E_N^(a,b)[e^(-t p_1) ∏ p_q^(n_q)] by an n-fold product rule.

    The rule carries the weight x^(a-H)(1-x)^b with H = Σ q n_q so the
    inverse powers stay bounded; the value at 2·nodes is returned with
    the difference to the coarser grid as error estimate.
    """
    if not 1 <= n <= MAX_ORACLE_N:
        raise DomainError(f"tensor quadrature supports 1 <= N <= {MAX_ORACLE_N}, got {n}")
    powers = normalize_powers(powers)
    degree = inverse_degree(powers)
    with mp.workprec(precision):
        a, b, t = mpf(a), mpf(b), mpf(t)
        if a - degree <= -1:
            raise DomainError(f"tensor quadrature needs a - {degree} > -1, got a={a}")
        norm = mp.exp(log_norm(EnsembleSpec.jacobi(n, a, b))) * mp.factorial(n)
        coarse = _tensor_sum(n, gauss_jacobi_rule(nodes, a - degree, b, precision), t, powers, degree)
        fine = _tensor_sum(
            n, gauss_jacobi_rule(2 * nodes, a - degree, b, precision), t, powers, degree
        )
        return OracleResult(
            value=fine / norm, error_estimate=abs(fine - coarse) / norm, nodes=2 * nodes
        )
