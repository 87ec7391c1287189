"""Residual suites behind ``verify``.

Each point function is a top-level callable taking a parameter dict and
returning ``(parameters, residual)``, so grids can be fanned out to a
process pool when ``MAX_WORKERS > 1``.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Any

from mpmath import mp, mpf

from app.bessel.laplace import laplace_e1, tau_jet
from app.core.config import get_settings
from app.core.errors import DomainError
from app.hankel.determinants import sigma_jet
from app.hankel.moments import laplace_moment
from app.hankel.oracle import tensor_quadrature_moment
from app.painleve.identities import p2_identity_residual, p2_squared_identity_residual
from app.painleve.residuals import (
    piii_residual,
    pv_residual,
    toda_residual_finite,
    toda_residual_limit,
)

logger = logging.getLogger(__name__)

Point = dict[str, Any]
PointResult = tuple[Point, mpf]


@dataclass(frozen=True, slots=True)
class Suite:
    name: str
    tolerance: float
    point: Callable[[Point], PointResult]
    default_grid: tuple[Point, ...]


# ---------------------------------------------------------------------------
# Point functions
# ---------------------------------------------------------------------------


def pv_point(p: Point) -> PointResult:
    jet = sigma_jet(p["n"], p["a"], p["b"], p["t"])
    return p, pv_residual(jet.sigma, jet.d1, jet.d2, p["t"], p["n"], p["a"], p["b"])


def piii_point(p: Point) -> PointResult:
    jet = tau_jet(p["a"], p["t"])
    return p, piii_residual(jet.tau, jet.d1, jet.d2, p["t"], p["a"])


def toda_finite_point(p: Point) -> PointResult:
    return p, toda_residual_finite(p["n"], p["a"], p["b"], p["t"])


def _laplace_value(a: mpf, t: mpf) -> mpf:
    return laplace_e1(a, t).value


def toda_limit_point(p: Point) -> PointResult:
    return p, toda_residual_limit(p["a"], p["t"], _laplace_value)


def hankel_oracle_point(p: Point) -> PointResult:
    powers = p.get("powers") or {}
    exact = laplace_moment(p["n"], p["a"], p["b"], p["t"], powers).value
    oracle = tensor_quadrature_moment(
        p["n"], p["a"], p["b"], p["t"], powers, nodes=p.get("nodes", 32)
    )
    with mp.workprec(128):
        return p, abs(exact - oracle.value) / abs(exact)


def cor_examples_point(p: Point) -> PointResult:
    if p["identity"] == "p2":
        return p, p2_identity_residual(p["n"], p["a"], p["b"], p["t"])
    return p, p2_squared_identity_residual(p["n"], p["a"], p["b"], p["t"])


# ---------------------------------------------------------------------------
# Default grids
# ---------------------------------------------------------------------------


def _grid(keys: tuple[str, ...], rows: Iterable[tuple]) -> tuple[Point, ...]:
    return tuple(dict(zip(keys, row, strict=True)) for row in rows)


_PV_GRID = _grid(
    ("n", "a", "b", "t"),
    ((n, a, b, t) for (n, a, b), t in product(
        ((2, 2.5, 0.5), (3, 4.0, -0.5), (5, 6.0, 0.5)), (0.1, 0.5, 1.0, 2.0, 5.0)
    )),
)

SUITES: dict[str, Suite] = {
    "pv": Suite("pv", 1e-8, pv_point, _PV_GRID),
    "piii": Suite(
        "piii",
        1e-3,
        piii_point,
        _grid(("a", "t"), product((2.5, 4.0), (0.5, 1.0, 2.0))),
    ),
    "toda-finite": Suite(
        "toda-finite",
        1e-8,
        toda_finite_point,
        _grid(("n", "a", "b", "t"), (
            (2, 2.5, -0.5, 0.5),
            (3, 3.5, 0.5, 1.0),
            (2, 2.5, 0.0, 0.5),
            (4, 5.0, -0.5, 2.0),
        )),
    ),
    "toda-limit": Suite(
        "toda-limit",
        1e-4,
        toda_limit_point,
        _grid(("a", "t"), product((2.5, 4.0), (0.0, 0.5, 1.0))),
    ),
    "hankel-oracle": Suite(
        "hankel-oracle",
        1e-8,
        hankel_oracle_point,
        _grid(
            ("n", "a", "b", "t", "powers", "nodes"),
            ((n, 5.0, 0.5, t, {2: 1}, 64) for n, t in product((1, 2), (0.0, 0.5, 1.0))),
        )
        + (
            {"n": 1, "a": 2.5, "b": 0.5, "t": 0.0, "powers": {}, "nodes": 64},
            {"n": 1, "a": 2.5, "b": 0.5, "t": 0.0, "powers": {2: 1}, "nodes": 64},
            {"n": 1, "a": 3.0, "b": -0.5, "t": 0.0, "powers": {1: 2}, "nodes": 64},
            {"n": 2, "a": 3.5, "b": 0.5, "t": 0.0, "powers": {2: 1}, "nodes": 32},
        ),
    ),
    "cor-examples": Suite(
        "cor-examples",
        1e-8,
        cor_examples_point,
        _grid(
            ("identity", "n", "a", "b", "t"),
            [("p2", 4, 3.5, 0.5, t) for t in (0.5, 1.0, 2.0)]
            + [("p2-squared", 4, 5.5, 0.5, t) for t in (0.5, 1.0, 2.0)],
        ),
    ),
}


def get_suite(name: str) -> Suite:
    try:
        return SUITES[name]
    except KeyError:
        raise DomainError(f"unknown suite {name!r}; expected one of {sorted(SUITES)}") from None


def run_suite(suite: Suite, grid: Iterable[Point], workers: int | None = None) -> list[PointResult]:
    """Evaluate *grid* in order, in a process pool when more than one worker is allowed."""
    grid = list(grid)
    workers = get_settings().MAX_WORKERS if workers is None else workers
    logger.info(
        "verify suite started",
        extra={"event": "suite_start", "suite": suite.name, "nodes": len(grid)},
    )
    if workers > 1 and len(grid) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(suite.point, grid))
    return [suite.point(p) for p in grid]
