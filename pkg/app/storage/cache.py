"""Content-addressed disk cache for exact results.

One JSON file per key hash under ``<root>/objects``; writes go to a
temporary file first and are moved into place with ``os.replace``, so
readers never observe partial files. Each record carries a sha256 of
its value, checked on read. ``index.jsonl`` records every write for
inspection. Use ``get_cache()`` for the configured instance.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
from pathlib import Path
from typing import Any

from mpmath import mpf

from app.core.config import get_settings
from app.numerics.precision import ExtReal

logger = logging.getLogger(__name__)

_cache: ResultCache | None = None


def cache_key(payload: dict[str, Any]) -> str:
    """sha256 of the canonical JSON form of *payload*."""
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class ResultCache:
    """Stores ExtReal values keyed by their parameter payload."""

    def __init__(self, root: Path | str) -> None:
        self.root = Path(root)
        self._objects = self.root / "objects"
        self._index = self.root / "index.jsonl"
        self._lock = threading.Lock()

    def _path(self, key: str) -> Path:
        return self._objects / key[:2] / f"{key}.json"

    def get(self, payload: dict[str, Any]) -> ExtReal | None:
        key = cache_key(payload)
        path = self._path(key)
        try:
            record = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            return None
        except (OSError, json.JSONDecodeError):
            logger.warning(
                "unreadable cache entry ignored",
                extra={"event": "cache_corrupt"},
            )
            return None
        if record.get("key") != key:
            logger.warning("cache entry hash mismatch", extra={"event": "cache_corrupt"})
            return None
        value = record.get("value")
        if not isinstance(value, dict) or record.get("checksum") != cache_key(value):
            logger.warning("cache entry checksum mismatch", extra={"event": "cache_corrupt"})
            return None
        try:
            result = ExtReal.from_exact(value)
        except (KeyError, TypeError, ValueError):
            logger.warning("malformed cache value ignored", extra={"event": "cache_corrupt"})
            return None
        logger.debug("cache hit", extra={"event": "cache_hit"})
        return result

    def put(self, payload: dict[str, Any], value: ExtReal | mpf, precision_bits: int) -> ExtReal:
        if not isinstance(value, ExtReal):
            value = ExtReal.of(value, precision_bits)
        key = cache_key(payload)
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        exact = value.to_exact()
        record = {"key": key, "payload": payload, "value": exact, "checksum": cache_key(exact)}
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(record, fh, sort_keys=True, default=str)
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
        with self._lock, self._index.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps({"key": key, "payload": payload}, sort_keys=True, default=str))
            fh.write("\n")
        return value

    def __len__(self) -> int:
        if not self._objects.exists():
            return 0
        return sum(1 for _ in self._objects.glob("*/*.json"))


def get_cache() -> ResultCache:
    """Lazily create the cache rooted at ``MOMENTS_CACHE_DIR``."""
    global _cache  # noqa: PLW0603
    if _cache is None:
        _cache = ResultCache(get_settings().MOMENTS_CACHE_DIR)
    return _cache
