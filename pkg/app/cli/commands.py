"""Sub-command implementations.

Each ``cmd_*`` takes the parsed namespace, performs the computation and
returns ``(record, exit_code)``; printing is left to :mod:`app.cli.main`.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import platform
import time
from pathlib import Path
from typing import Any

import mpmath
import numpy as np
import scipy
import sympy
from mpmath import mp, mpf
from pydantic import BaseModel

from app.bessel.laplace import laplace_e1
from app.bessel.moments import p_moments_mixed
from app.cli.records import (
    DecimalValue,
    LimitsRecord,
    MomentRecord,
    OutputEntry,
    RunManifest,
    VerifyPoint,
    VerifyReport,
)
from app.cli.suites import Point, get_suite, run_suite
from app.core.errors import DomainError
from app.core.version import get_version
from app.moments.exact import joint_moment_exact
from app.moments.limits import conjecture_g_factor, leading_order, limit_ratio_check, ms_limit
from app.moments.montecarlo import joint_moment_mc
from app.moments.specs import MomentSpec
from app.numerics.precision import resolve_precision
from app.storage.cache import get_cache

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def parse_h(text: str) -> tuple[float, ...]:
    """``"h0,h1,…"`` → tuple of non-negative floats."""
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise DomainError(f"--h must be a comma-separated list of numbers, got {text!r}") from None
    if not values:
        raise DomainError("--h needs at least one exponent")
    return values


def parse_powers(text: str | None) -> dict[int, int]:
    """``"2:1,3:2"`` → {2: 1, 3: 2}."""
    out: dict[int, int] = {}
    for item in (text or "").split(","):
        if not item.strip():
            continue
        try:
            q, count = item.split(":")
            out[int(q)] = out.get(int(q), 0) + int(count)
        except ValueError:
            raise DomainError(f"--powers entries look like q:n_q, got {item!r}") from None
    return out


def _versions() -> dict[str, str]:
    try:
        toolkit = get_version()
    except RuntimeError:
        toolkit = "unknown"
    return {
        "cpoly-moments": toolkit,
        "python": platform.python_version(),
        "mpmath": mpmath.__version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "sympy": sympy.__version__,
    }


def _parameters(args: argparse.Namespace) -> dict[str, Any]:
    skip = {"func", "command", "out", "export_samples"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _manifest(
    args: argparse.Namespace,
    started: float,
    precision: int,
    outputs: list[OutputEntry],
    seed: int | None = None,
) -> RunManifest:
    return RunManifest(
        command=args.command,
        parameters=_parameters(args),
        seed=seed,
        precision_bits=precision,
        versions=_versions(),
        wall_time_ms=round((time.perf_counter() - started) * 1000, 1),
        outputs=outputs,
    )


def _write_with_manifest(path: Path, body: str, manifest: RunManifest) -> None:
    path.write_text(body, encoding="utf-8")
    manifest_path = path.with_name(path.name + ".manifest.json")
    manifest_path.write_text(manifest.model_dump_json(indent=2), encoding="utf-8")


# ---------------------------------------------------------------------------
# moment
# ---------------------------------------------------------------------------


def cmd_moment(args: argparse.Namespace) -> tuple[BaseModel, int]:
    started = time.perf_counter()
    precision = resolve_precision(args.precision)
    spec = MomentSpec(args.group, args.n, parse_h(args.h))
    outputs: list[OutputEntry] = []
    if args.mode == "exact":
        cache = None if args.no_cache else get_cache()
        value = joint_moment_exact(spec, precision=precision, cache=cache)
        decimal = DecimalValue.of(value, precision)
        outputs.append(OutputEntry(name="value", value=decimal))
        record = MomentRecord(
            group=spec.group,
            n=spec.n,
            h=[repr(v) for v in spec.h],
            method="exact",
            value=decimal,
            manifest=_manifest(args, started, precision, outputs),
        )
        return record, 0

    estimate = joint_moment_mc(spec, args.samples, args.seed)
    with mp.workprec(precision):
        value = DecimalValue.of(mpf(estimate.estimate), precision)
        stderr = DecimalValue.of(mpf(estimate.stderr), precision)
    outputs += [OutputEntry(name="value", value=value), OutputEntry(name="stderr", value=stderr)]
    batch = estimate.batch
    if args.export_samples and batch is not None:
        path = batch.to_csv(args.export_samples)
        outputs.append(OutputEntry(name="samples", path=str(path)))
    record = MomentRecord(
        group=spec.group,
        n=spec.n,
        h=[repr(v) for v in spec.h],
        method="mc",
        value=value,
        stderr=stderr,
        samples=estimate.samples,
        acceptance_rate=None if batch is None else round(batch.acceptance_rate, 6),
        mixing_ok=None if batch is None else batch.mixing_ok,
        manifest=_manifest(args, started, precision, outputs, seed=args.seed),
    )
    return record, 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _select_points(defaults: tuple[Point, ...], overrides: dict[str, Any]) -> list[Point]:
    """Default points matching *overrides*, or one point built from them."""
    if not overrides:
        return list(defaults)
    matching = [
        p for p in defaults if all(k in p and float(p[k]) == float(v) for k, v in overrides.items())
    ]
    if matching:
        return matching
    point = dict(defaults[0])
    point.update(overrides)
    return [point]


def cmd_verify(args: argparse.Namespace) -> tuple[BaseModel, int]:
    started = time.perf_counter()
    suite = get_suite(args.suite)
    overrides = {k: getattr(args, k) for k in ("n", "a", "b", "t") if getattr(args, k) is not None}
    grid = _select_points(suite.default_grid, overrides)
    tolerance = args.tolerance if args.tolerance is not None else suite.tolerance
    results = run_suite(suite, grid, workers=args.workers)
    precision = resolve_precision(None)
    points = []
    for params, residual in results:
        passed = abs(residual) <= tolerance
        points.append(
            VerifyPoint(
                parameters={k: str(v) for k, v in params.items()},
                residual=DecimalValue.of(residual, precision),
                tolerance=tolerance,
                passed=passed,
            )
        )
        if not passed:
            logger.warning(
                "residual above tolerance",
                extra={"event": "verify_failed", "suite": suite.name, "residual": str(residual)},
            )
    all_passed = all(p.passed for p in points)
    report = VerifyReport(
        suite=suite.name,
        points=points,
        passed=all_passed,
        manifest=_manifest(args, started, precision, []),
    )
    return report, 0 if all_passed else 1


# ---------------------------------------------------------------------------
# limits
# ---------------------------------------------------------------------------


def _laplace_curve(args: argparse.Namespace, started: float, precision: int) -> tuple[str, RunManifest]:
    if args.a is None or args.tmax is None:
        raise DomainError("laplace-curve needs --a and --tmax")
    if args.points < 2:
        raise DomainError(f"laplace-curve needs at least 2 points, got {args.points}")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["t", "value", "error_estimate"])
    for i in range(args.points):
        t = args.tmax * i / (args.points - 1)
        result = laplace_e1(args.a, t)
        writer.writerow([repr(t), mp.nstr(result.value, 17), repr(result.increment)])
    outputs = [OutputEntry(name="curve", path=args.out)] if args.out else []
    return buffer.getvalue(), _manifest(args, started, precision, outputs)


def _limit_values(args: argparse.Namespace, precision: int) -> tuple[dict, dict[str, bool]]:
    target = args.target
    if target == "ratio":
        check = limit_ratio_check(args.group, args.s, args.k, precision=precision)
        values = {
            "extrapolated": check.extrapolated,
            "error_estimate": check.error_estimate,
            "closed_form": check.closed_form,
            "gap": check.gap,
        }
        return values, {"uncertain": check.uncertain}
    if target in ("leading", "ms"):
        if target == "leading":
            lead = leading_order(args.group, parse_h(args.h), precision=precision)
        else:
            lead = ms_limit(args.group, int(args.s), args.k, precision=precision)
        return {"exponent": lead.exponent, "coefficient": lead.coefficient.value}, {}
    if target == "g-factor":
        return {"g": conjecture_g_factor(args.k, int(args.s), precision=precision).value}, {}
    if target == "p-mixed":
        result = p_moments_mixed(args.a, args.t, parse_powers(args.powers), precision=precision)
        values = {
            "value": result.value,
            "error_estimate": result.error_estimate,
            "closed_form": result.closed_form,
            "closed_form_error": result.closed_form_error,
        }
        return values, {"uncertain": result.uncertain}
    raise DomainError(f"unknown limits target {target!r}")


def cmd_limits(args: argparse.Namespace) -> tuple[BaseModel | str, int]:
    started = time.perf_counter()
    precision = resolve_precision(args.precision)
    if args.target == "laplace-curve":
        body, manifest = _laplace_curve(args, started, precision)
        if args.out:
            _write_with_manifest(Path(args.out), body, manifest)
        return body, 0
    values, flags = _limit_values(args, precision)
    decimals = {
        k: None if v is None else DecimalValue.of(v, precision) for k, v in values.items()
    }
    outputs = [OutputEntry(name=k, value=v) for k, v in decimals.items() if v is not None]
    record = LimitsRecord(
        target=args.target,
        values=decimals,
        flags=flags,
        manifest=_manifest(args, started, precision, outputs),
    )
    if args.out:
        _write_with_manifest(Path(args.out), record.model_dump_json(indent=2), record.manifest)
    return record, 0
