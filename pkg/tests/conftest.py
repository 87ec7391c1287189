"""Shared fixtures.

Every test runs at 256-bit mpmath precision with a fresh settings cache,
so environment changes made through ``monkeypatch`` take effect.
"""

from __future__ import annotations

import pytest
from mpmath import mp

from app.core.config import get_settings


@pytest.fixture(autouse=True)
def _mp_precision():
    with mp.workprec(256):
        yield


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch: pytest.MonkeyPatch, tmp_path):
    """Isolate settings and the disk cache from the developer's environment."""
    monkeypatch.setenv("MOMENTS_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.setattr("app.storage.cache._cache", None)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
