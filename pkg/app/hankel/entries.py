"""The Hankel entries g_m(t).

g_m(t) = (1/Γ(b+1)) ∫₀¹ e^(-t/x) x^(a+2N-2-m) (1-x)^b dx
       = e^(-t) U(b+1, -a-2N+2+m; t),

with g_m(0) = Γ(a+2N-1-m)/Γ(a+2N+b-m) and dg_m/dt = -g_{m+1}.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

from mpmath import mp, mpf

from app.core.config import get_settings
from app.core.errors import ConvergenceError, DomainError, IntegrabilityError
from app.numerics.quadrature import gauss_jacobi_rule

logger = logging.getLogger(__name__)

EntryMethod = Literal["auto", "quadrature", "confluent"]
MethodTag = Literal["closed-form-t0", "confluent-entry", "quadrature-entry"]


@dataclass(frozen=True, slots=True)
class GEntrySpec:
    n: int
    a: mpf
    b: mpf
    m: int
    t: mpf

    def __post_init__(self) -> None:
        for name in ("a", "b", "t"):
            object.__setattr__(self, name, mpf(getattr(self, name)))
        validate_entry_range(self.n, self.a, self.b, self.m, self.t)


def validate_entry_range(n: int, a, b, m_max: int, t) -> None:
    if n < 1:
        raise DomainError(f"N must be positive, got {n}")
    if mpf(b) <= -1:
        raise DomainError(f"b must exceed -1, got {b}")
    if mpf(t) < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    if m_max < 0:
        raise DomainError(f"entry index must be non-negative, got {m_max}")
    if m_max >= mpf(a) + 2 * n - 1:
        raise IntegrabilityError(
            f"g_{m_max} diverges: the index must stay below a + 2N - 1 = {mpf(a) + 2 * n - 1}"
        )


def method_tag(t, method: EntryMethod | None = None) -> MethodTag:
    method = method or get_settings().ENTRY_METHOD
    if mpf(t) == 0:
        return "closed-form-t0"
    if method == "quadrature":
        return "quadrature-entry"
    return "confluent-entry"


def _closed_form(n: int, a: mpf, b: mpf, m: int) -> mpf:
    top = a + 2 * n - 1 - m
    return mp.exp(mp.loggamma(top) - mp.loggamma(top + b + 1))


def _confluent(n: int, a: mpf, b: mpf, m: int, t: mpf) -> mpf:
    return mp.exp(-t) * mp.hyperu(b + 1, -a - 2 * n + 2 + m, t)


def _quadrature(n: int, a: mpf, b: mpf, t: mpf, m_max: int, precision: int) -> list[mpf]:
    """All entries from one Gauss–Jacobi rule with the smallest x-exponent."""
    alpha = a + 2 * n - 2 - m_max
    cap = get_settings().QUADRATURE_MAX_NODES
    tol = mp.ldexp(1, -precision // 2)
    scale = 1 / mp.gamma(b + 1)

    def _evaluate(nodes: int) -> list[mpf]:
        rule = gauss_jacobi_rule(nodes, alpha, b, precision)
        base = [w * mp.exp(-t / x) for x, w in zip(rule.nodes, rule.weights)]
        return [
            scale * mp.fsum(bw * x ** (m_max - m) for x, bw in zip(rule.nodes, base))
            for m in range(m_max + 1)
        ]

    nodes = 16
    previous = _evaluate(nodes)
    while nodes < cap:
        nodes *= 2
        current = _evaluate(nodes)
        if all(abs(c - p) <= tol * abs(c) for c, p in zip(current, previous)):
            logger.debug(
                "quadrature entries converged",
                extra={"event": "entries_quadrature", "nodes": nodes, "n": n},
            )
            return current
        previous = current
    raise ConvergenceError(
        f"entry quadrature did not converge within {cap} nodes (N={n}, a={a}, b={b}, t={t})"
    )


def g_entries(
    n: int,
    a,
    b,
    t,
    m_max: int,
    *,
    precision: int | None = None,
    method: EntryMethod | None = None,
) -> list[mpf]:
    """g_0(t), …, g_{m_max}(t) at the current (or given) precision."""
    validate_entry_range(n, a, b, m_max, t)
    bits = mp.prec if precision is None else precision
    tag = method_tag(t, method)
    with mp.workprec(bits):
        a, b, t = mpf(a), mpf(b), mpf(t)
        if tag == "closed-form-t0":
            return [_closed_form(n, a, b, m) for m in range(m_max + 1)]
        if tag == "quadrature-entry":
            return _quadrature(n, a, b, t, m_max, bits)
        return [_confluent(n, a, b, m, t) for m in range(m_max + 1)]


def g_entry(spec: GEntrySpec, *, precision: int | None = None, method: EntryMethod | None = None) -> mpf:
    """Single entry g_m(t)."""
    bits = mp.prec if precision is None else precision
    tag = method_tag(spec.t, method)
    with mp.workprec(bits):
        if tag == "closed-form-t0":
            return _closed_form(spec.n, spec.a, spec.b, spec.m)
        if tag == "confluent-entry":
            return _confluent(spec.n, spec.a, spec.b, spec.m, spec.t)
        return _quadrature(spec.n, spec.a, spec.b, spec.t, spec.m, bits)[spec.m]
