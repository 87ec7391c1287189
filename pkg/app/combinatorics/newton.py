"""Newton's identities between power sums p_m and elementary symmetric e_m."""

from __future__ import annotations

from dataclasses import dataclass

import sympy

from app.core.errors import DomainError


def e_symbols(max_degree: int) -> list[sympy.Symbol]:
    return [sympy.Symbol(f"e{m}") for m in range(1, max_degree + 1)]


def p_symbols(max_degree: int) -> list[sympy.Symbol]:
    return [sympy.Symbol(f"p{m}") for m in range(1, max_degree + 1)]


@dataclass(frozen=True, slots=True)
class NewtonTable:
    """p_m in terms of e's and e_m in terms of p's, for m = 1..max_degree."""

    max_degree: int
    p_in_e: dict[int, sympy.Expr]
    e_in_p: dict[int, sympy.Expr]

    def p_to_e(self, expr: sympy.Expr) -> sympy.Expr:
        subs = {sympy.Symbol(f"p{m}"): v for m, v in self.p_in_e.items()}
        return sympy.expand(sympy.sympify(expr).subs(subs))

    def e_to_p(self, expr: sympy.Expr) -> sympy.Expr:
        subs = {sympy.Symbol(f"e{m}"): v for m, v in self.e_in_p.items()}
        return sympy.expand(sympy.sympify(expr).subs(subs))


def newton_p_from_e(max_degree: int) -> NewtonTable:
    """Both conversion directions up to *max_degree*.

    p_m = (-1)^(m-1) m e_m + Σ_{i=1}^{m-1} (-1)^(m-1+i) e_{m-i} p_i and
    m e_m = Σ_{i=1}^{m} (-1)^(i-1) e_{m-i} p_i, with e_0 = 1.
    """
    if max_degree < 1:
        raise DomainError(f"max_degree must be >= 1, got {max_degree}")
    es = [sympy.Integer(1)] + e_symbols(max_degree)
    ps = [sympy.Integer(0)] + p_symbols(max_degree)

    p_in_e: dict[int, sympy.Expr] = {}
    for m in range(1, max_degree + 1):
        value = (-1) ** (m - 1) * m * es[m]
        for i in range(1, m):
            value += (-1) ** (m - 1 + i) * es[m - i] * p_in_e[i]
        p_in_e[m] = sympy.expand(value)

    e_in_p: dict[int, sympy.Expr] = {0: sympy.Integer(1)}
    for m in range(1, max_degree + 1):
        value = sum(
            ((-1) ** (i - 1) * e_in_p[m - i] * ps[i] for i in range(1, m + 1)),
            sympy.Integer(0),
        )
        e_in_p[m] = sympy.expand(value / m)
    del e_in_p[0]
    return NewtonTable(max_degree=max_degree, p_in_e=p_in_e, e_in_p=e_in_p)
