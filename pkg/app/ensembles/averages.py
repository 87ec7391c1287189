"""Exact averages over the Jacobi and Laguerre ensembles (β = 2).

Normalizations are Selberg/Laguerre products of Gamma functions.
Schur averages use the product formula by default; the Andreief
determinant of moments is the independent cross-check.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from fractions import Fraction
from typing import Literal

from mpmath import mp, mpf

from app.combinatorics.epoly import EPolynomial, coefficient_to_mpf
from app.combinatorics.partitions import Partition
from app.combinatorics.schur import expand_e_product
from app.core.errors import IntegrabilityError
from app.ensembles.spec import EnsembleSpec
from app.numerics.linalg import det_checked
from app.numerics.special import log_gamma

logger = logging.getLogger(__name__)

SchurMethod = Literal["product", "determinant"]


def _fraction_to_mpf(value: Fraction) -> mpf:
    return mpf(value.numerator) / value.denominator


def log_norm(spec: EnsembleSpec) -> mpf:
    """ln of the normalization constant of the ensemble.

    Jacobi: ln[(1/N!) ∏_{j=1}^N Γ(a+j)Γ(b+j)Γ(1+j)/Γ(a+b+N+j)];
    Laguerre: ln[(1/N!) ∏_{j=1}^N Γ(a+j)Γ(1+j)].
    """
    n, a = spec.n, spec.a
    total = -log_gamma(n + 1)
    for j in range(1, n + 1):
        total += log_gamma(a + j) + log_gamma(1 + j)
        if spec.family == "jacobi":
            total += log_gamma(spec.b + j) - log_gamma(a + spec.b + n + j)
    return total


def _schur_product(spec: EnsembleSpec, lam: Partition) -> mpf:
    n, a = spec.n, spec.a
    value = _fraction_to_mpf(lam.hook_content_dimension(n))
    for i, part in enumerate(lam.parts, start=1):
        value *= mp.rf(a + n - i + 1, part)
        if spec.family == "jacobi":
            value /= mp.rf(a + spec.b + 2 * n - i + 1, part)
    return value


def _moment_ratio(spec: EnsembleSpec, k: int) -> mpf:
    """∫x^k w / ∫w for the one-point weight."""
    if spec.family == "jacobi":
        return mp.rf(spec.a + 1, k) / mp.rf(spec.a + spec.b + 2, k)
    return mp.rf(spec.a + 1, k)


def _schur_determinant(spec: EnsembleSpec, lam: Partition) -> mpf:
    n = spec.n
    rows = lam.padded(n)
    with mp.workprec(mp.prec + 16 * n):
        num = [
            [_moment_ratio(spec, rows[i] + 2 * n - (i + 1) - (j + 1)) for j in range(n)]
            for i in range(n)
        ]
        den = [[_moment_ratio(spec, 2 * n - (i + 1) - (j + 1)) for j in range(n)] for i in range(n)]
        value = det_checked(num) / det_checked(den)
    return +value


def schur_average(
    spec: EnsembleSpec, lam: Partition, method: SchurMethod = "product"
) -> mpf:
    """E[s_λ(x_1, …, x_N)]; zero when λ has more than N rows."""
    if lam.length > spec.n:
        return mpf(0)
    if not lam.parts:
        return mpf(1)
    if method == "determinant":
        return _schur_determinant(spec, lam)
    return _schur_product(spec, lam)


def _e_product_average(spec: EnsembleSpec, indices: Sequence[int], method: SchurMethod) -> mpf:
    expansion = expand_e_product(tuple(sorted(indices)), spec.n)
    return mp.fsum(
        _fraction_to_mpf(c) * schur_average(spec, lam, method) for lam, c in expansion
    )


def inv_e_average(
    spec: EnsembleSpec, product: EPolynomial, method: SchurMethod = "product"
) -> mpf:
    """E[P(e_1(1/x), e_2(1/x), …)] for an e-polynomial P with concrete coefficients.

    Each monomial ∏ e_{k_i}(1/x) with H factors equals (∏x)^(-H) ∏ e_{N-k_i}(x);
    the weight shift a → a - H is compensated by the ratio of normalizations.

    Raises:
        IntegrabilityError: If a - H <= -1 for some monomial.
    """
    n = spec.n
    terms = []
    base_log_norm = log_norm(spec)
    for key, coeff in product:
        depth = len(key)
        if depth == 0:
            terms.append(coefficient_to_mpf(coeff))
            continue
        if spec.a - depth <= -1:
            raise IntegrabilityError(
                f"inverse degree {depth} is not integrable for a={spec.a} "
                f"(needs a - {depth} > -1)"
            )
        if any(k > n for k in key):
            continue
        shifted = spec.shifted(-depth)
        ratio = mp.exp(log_norm(shifted) - base_log_norm)
        average = _e_product_average(shifted, [n - k for k in key], method)
        terms.append(coefficient_to_mpf(coeff) * ratio * average)
    return mp.fsum(terms)
