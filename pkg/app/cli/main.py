"""Entry point of the ``cpoly-moments`` command.

Results go to stdout as JSON (CSV for curves); logs go to stderr.
Exit codes: 0 success, 1 failed verification, 2 usage error,
3 domain error, 4 convergence or precision failure, 5 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence

from pydantic import BaseModel

from app.cli.commands import cmd_limits, cmd_moment, cmd_verify
from app.cli.records import SCHEMA_MODELS
from app.cli.suites import SUITES
from app.core.config import get_settings
from app.core.errors import MomentsError
from app.core.logging import setup_logging

logger = logging.getLogger(__name__)

INTERNAL_ERROR_EXIT = 5


def _cmd_schema(args: argparse.Namespace) -> tuple[str, int]:
    names = [args.record] if args.record else sorted(SCHEMA_MODELS)
    schemas = {name: SCHEMA_MODELS[name].model_json_schema() for name in names}
    return json.dumps(schemas, indent=2, sort_keys=True), 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpoly-moments",
        description="Joint moments of characteristic-polynomial derivatives over USp(2N) and SO(2N).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    moment = sub.add_parser("moment", help="finite-N joint moment (exact or Monte Carlo)")
    moment.add_argument("--group", choices=("usp", "so"), required=True)
    moment.add_argument("--n", type=int, required=True)
    moment.add_argument("--h", required=True, help='exponents "h0,h1,…"')
    moment.add_argument("--mode", choices=("exact", "mc"), default="exact")
    moment.add_argument("--samples", type=int, default=10_000)
    moment.add_argument("--seed", type=int, default=0)
    moment.add_argument("--precision", type=int)
    moment.add_argument("--no-cache", action="store_true")
    moment.add_argument("--export-samples", metavar="PATH")
    moment.set_defaults(func=cmd_moment)

    verify = sub.add_parser("verify", help="Painlevé/Toda/identity residual suites")
    verify.add_argument("--suite", choices=sorted(SUITES), required=True)
    verify.add_argument("--grid", choices=("default",), default="default")
    verify.add_argument("--n", type=int)
    verify.add_argument("--a", type=float)
    verify.add_argument("--b", type=float)
    verify.add_argument("--t", type=float)
    verify.add_argument("--tolerance", type=float)
    verify.add_argument("--workers", type=int)
    verify.set_defaults(func=cmd_verify)

    limits = sub.add_parser("limits", help="large-N and hard-edge limits")
    limits.add_argument(
        "--target",
        choices=("ratio", "leading", "ms", "g-factor", "laplace-curve", "p-mixed"),
        required=True,
    )
    limits.add_argument("--group", choices=("usp", "so"), default="usp")
    limits.add_argument("--s", type=float)
    limits.add_argument("--k", type=int)
    limits.add_argument("--h")
    limits.add_argument("--a", type=float)
    limits.add_argument("--t", type=float)
    limits.add_argument("--powers", help='power sums "q:n_q,…" for p-mixed')
    limits.add_argument("--tmax", type=float)
    limits.add_argument("--points", type=int, default=20)
    limits.add_argument("--precision", type=int)
    limits.add_argument("--out", metavar="PATH")
    limits.set_defaults(func=cmd_limits)

    schema = sub.add_parser("schema", help="print the JSON schemas of the output records")
    schema.add_argument("--record", choices=sorted(SCHEMA_MODELS))
    schema.set_defaults(func=_cmd_schema)
    return parser


def _required(args: argparse.Namespace) -> list[str]:
    """Target-specific flags argparse cannot express."""
    if args.command != "limits":
        return []
    needed = {
        "ratio": ("s", "k"),
        "leading": ("h",),
        "ms": ("s", "k"),
        "g-factor": ("s", "k"),
        "laplace-curve": ("a", "tmax"),
        "p-mixed": ("a", "t"),
    }[args.target]
    return [f"--{name}" for name in needed if getattr(args, name) is None]


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    missing = _required(args)
    if missing:
        parser.print_usage(sys.stderr)
        print(f"cpoly-moments: error: {args.target} needs {', '.join(missing)}", file=sys.stderr)
        return 2

    setup_logging(get_settings().LOG_LEVEL)
    logger.info("command started", extra={"event": "command_start", "command": args.command})
    try:
        result, code = args.func(args)
    except MomentsError as exc:
        print(f"cpoly-moments: {exc}", file=sys.stderr)
        logger.info(
            "command failed",
            extra={"event": "command_failed", "command": args.command},
        )
        return exc.exit_code
    except Exception as exc:
        print(f"cpoly-moments: internal error: {exc!r}", file=sys.stderr)
        logger.error(
            "command crashed",
            extra={"event": "command_crashed", "command": args.command},
            exc_info=True,
        )
        return INTERNAL_ERROR_EXIT

    text = result.model_dump_json(indent=2) if isinstance(result, BaseModel) else result
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
