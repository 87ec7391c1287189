"""Dense linear algebra at extended precision.

Determinants and solves run on mpmath matrices with power-of-two
balancing (exact, no rounding introduced) before elimination.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

from mpmath import mp, mpf

from app.core.errors import DomainError, PrecisionError

logger = logging.getLogger(__name__)


def to_matrix(rows: Sequence[Sequence]) -> mp.matrix:
    n = len(rows)
    if n == 0:
        return mp.matrix(0, 0)
    if any(len(r) != n for r in rows):
        raise DomainError("determinant requires a square matrix")
    return mp.matrix([[mpf(v) for v in r] for r in rows])


def _power_of_two_exponent(value: mpf) -> int:
    if not value:
        return 0
    return int(mp.mag(value))


def balance_general(m: mp.matrix) -> tuple[mp.matrix, int]:
    """Scale rows then columns by powers of two.

    Returns the balanced copy and ``shift`` with det(m) = det(out) * 2^shift.
    """
    out = m.copy()
    n = out.rows
    shift = 0
    for i in range(n):
        e = max((_power_of_two_exponent(out[i, j]) for j in range(n)), default=0)
        if e:
            for j in range(n):
                out[i, j] = mp.ldexp(out[i, j], -e)
            shift += e
    for j in range(n):
        e = max((_power_of_two_exponent(out[i, j]) for i in range(n)), default=0)
        if e:
            for i in range(n):
                out[i, j] = mp.ldexp(out[i, j], -e)
            shift += e
    return out, shift


def balance_symmetric(m: mp.matrix) -> tuple[mp.matrix, list[int]]:
    """Jacobi scaling D m D with D = diag(2^-e_i), e_i ≈ log2 √|m_ii|.

    Returns the scaled copy and the exponents; det(m) = det(out) * 2^(2 Σ e_i).
    """
    n = m.rows
    exps = [_power_of_two_exponent(m[i, i]) // 2 for i in range(n)]
    out = m.copy()
    for i in range(n):
        for j in range(n):
            out[i, j] = mp.ldexp(out[i, j], -exps[i] - exps[j])
    return out, exps


class LUSystem:
    """One LU factorization reused for a determinant and many solves.

    Partial pivoting by largest magnitude. Only an exactly zero pivot
    column marks the matrix singular, so the scale of the entries never
    decides singularity.
    """

    def __init__(self, m: mp.matrix) -> None:
        self.size = m.rows
        self.singular = False
        self._lu, self._perm = self._factor(m.copy())

    def _factor(self, a: mp.matrix) -> tuple[mp.matrix | None, list[int] | None]:
        n = a.rows
        perm: list[int] = []
        for j in range(n - 1):
            p = max(range(j, n), key=lambda i: abs(a[i, j]))
            if not a[p, j]:
                self.singular = True
                return None, None
            perm.append(p)
            if p != j:
                for k in range(n):
                    a[j, k], a[p, k] = a[p, k], a[j, k]
            pivot = a[j, j]
            for i in range(j + 1, n):
                factor = a[i, j] / pivot
                a[i, j] = factor
                if factor:
                    for k in range(j + 1, n):
                        a[i, k] -= factor * a[j, k]
        if n and not a[n - 1, n - 1]:
            self.singular = True
            return None, None
        return a, perm

    def det(self) -> mpf:
        if self.singular:
            return mpf(0)
        value = mpf(1)
        for i in range(self.size):
            value *= self._lu[i, i]
        for j, p in enumerate(self._perm):
            if p != j:
                value = -value
        return value

    def solve(self, rhs: Sequence) -> mp.matrix:
        if self.singular:
            raise PrecisionError("matrix is singular at the working precision")
        b = mp.matrix([mpf(v) for v in rhs])
        y = mp.L_solve(self._lu, b, self._perm)
        return mp.U_solve(self._lu, y)


def det_ext(matrix: Sequence[Sequence] | mp.matrix, *, balance: bool = True) -> mpf:
    """Determinant by partial-pivoting LU at the current precision.

    A singular matrix (exactly zero pivot column) yields 0. An empty matrix has det 1.
    """
    m = matrix if isinstance(matrix, mp.matrix) else to_matrix(matrix)
    if m.rows == 0:
        return mpf(1)
    shift = 0
    if balance:
        m, shift = balance_general(m)
    value = LUSystem(m).det()
    return mp.ldexp(value, shift) if value else value


def det_checked(matrix: Sequence[Sequence] | mp.matrix, *, balance: bool = True) -> mpf:
    """Determinant confirmed at twice the working precision.

    Raises:
        PrecisionError: If the two evaluations disagree in sign or beyond
            half the working precision.
    """
    bits = mp.prec
    value = det_ext(matrix, balance=balance)
    with mp.workprec(2 * bits):
        check = det_ext(matrix, balance=balance)
        if mp.sign(check) != mp.sign(value):
            raise PrecisionError("determinant sign is unstable at the working precision")
        if check and abs(check - value) > mp.ldexp(abs(check), -bits // 2):
            logger.warning(
                "determinant lost more than half its bits",
                extra={"event": "det_precision_loss", "precision_bits": bits},
            )
            raise PrecisionError("determinant lost more than half of its working precision")
    return value


def least_squares(rows: Sequence[Sequence], rhs: Sequence) -> tuple[list[mpf], mpf]:
    """Column-normalized least squares via Householder QR.

    Returns:
        ``(solution, relative_residual)`` where the residual is
        ``|A x - b| / |b|``.
    """
    a = to_rect(rows)
    b = mp.matrix([mpf(v) for v in rhs])
    scales = []
    for j in range(a.cols):
        norm = mp.norm(a.column(j))
        s = 1 / norm if norm else mpf(1)
        scales.append(s)
        for i in range(a.rows):
            a[i, j] *= s
    x, residual = mp.qr_solve(a, b)
    bnorm = mp.norm(b)
    solution = [x[j] * scales[j] for j in range(a.cols)]
    return solution, (residual / bnorm if bnorm else residual)


def to_rect(rows: Sequence[Sequence]) -> mp.matrix:
    return mp.matrix([[mpf(v) for v in r] for r in rows])
