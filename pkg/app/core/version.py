"""Single-source version helper.

The toolkit version recorded in every run manifest is read from
``pyproject.toml`` so that a bump touches only one place.
"""

from __future__ import annotations

import functools
import tomllib
from pathlib import Path

_PYPROJECT_PATH = Path(__file__).resolve().parents[2] / "pyproject.toml"


@functools.cache
def get_version() -> str:
    """Return the project version string from *pyproject.toml*.

    Returns:
        Version string, e.g. ``"0.1.0"``.

    Raises:
        RuntimeError: If ``pyproject.toml`` is missing or has no version field.
    """
    if not _PYPROJECT_PATH.exists():
        raise RuntimeError(f"pyproject.toml not found at {_PYPROJECT_PATH}")

    data = tomllib.loads(_PYPROJECT_PATH.read_text(encoding="utf-8"))
    version = data.get("project", {}).get("version")
    if not version:
        raise RuntimeError("version field not found in pyproject.toml")
    return str(version)
