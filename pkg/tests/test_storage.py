"""Tests for app.storage.cache."""

from __future__ import annotations

import json
import logging

from mpmath import mp, mpf

from app.numerics.precision import ExtReal
from app.storage.cache import ResultCache, cache_key, get_cache

_PAYLOAD = {"op": "joint_moment_exact", "group": "usp", "n": 3, "h": ["2"], "precision_bits": 256}


class TestCacheKey:
    def test_independent_of_key_order(self):
        reordered = dict(reversed(list(_PAYLOAD.items())))
        assert cache_key(reordered) == cache_key(_PAYLOAD)

    def test_sensitive_to_values(self):
        assert cache_key({**_PAYLOAD, "n": 4}) != cache_key(_PAYLOAD)


class TestResultCache:
    def test_miss_returns_none(self, tmp_path):
        assert ResultCache(tmp_path).get(_PAYLOAD) is None
        assert len(ResultCache(tmp_path)) == 0

    def test_round_trip_is_bit_exact(self, tmp_path):
        cache = ResultCache(tmp_path)
        value = ExtReal.of(mp.pi / 7, 256)
        cache.put(_PAYLOAD, value, 256)
        hit = cache.get(_PAYLOAD)
        assert hit == value
        assert hit.value._mpf_ == value.value._mpf_

    def test_negative_and_plain_mpf(self, tmp_path):
        cache = ResultCache(tmp_path)
        stored = cache.put(_PAYLOAD, mpf(-3) / 8, 128)
        assert stored.precision_bits == 128
        assert cache.get(_PAYLOAD).value == mpf(-3) / 8

    def test_layout_and_index(self, tmp_path):
        cache = ResultCache(tmp_path)
        cache.put(_PAYLOAD, ExtReal.of(1, 64), 64)
        cache.put({**_PAYLOAD, "n": 4}, ExtReal.of(2, 64), 64)
        key = cache_key(_PAYLOAD)
        assert (tmp_path / "objects" / key[:2] / f"{key}.json").exists()
        lines = (tmp_path / "index.jsonl").read_text(encoding="utf-8").splitlines()
        assert len(lines) == 2
        assert json.loads(lines[0])["key"] == key
        assert len(cache) == 2
        assert not list(tmp_path.rglob("*.tmp"))

    def test_overwrite_keeps_single_object(self, tmp_path):
        cache = ResultCache(tmp_path)
        cache.put(_PAYLOAD, ExtReal.of(1, 64), 64)
        cache.put(_PAYLOAD, ExtReal.of(1, 64), 64)
        assert len(cache) == 1

    def test_corrupt_entry_is_ignored(self, tmp_path, caplog):
        cache = ResultCache(tmp_path)
        cache.put(_PAYLOAD, ExtReal.of(1, 64), 64)
        key = cache_key(_PAYLOAD)
        (tmp_path / "objects" / key[:2] / f"{key}.json").write_text("{not json", encoding="utf-8")
        with caplog.at_level(logging.WARNING):
            assert cache.get(_PAYLOAD) is None
        assert any(r.event == "cache_corrupt" for r in caplog.records)

    def test_hash_mismatch_is_ignored(self, tmp_path):
        cache = ResultCache(tmp_path)
        cache.put(_PAYLOAD, ExtReal.of(1, 64), 64)
        path = tmp_path / "objects" / cache_key(_PAYLOAD)[:2] / f"{cache_key(_PAYLOAD)}.json"
        record = json.loads(path.read_text(encoding="utf-8"))
        record["key"] = "0" * 64
        path.write_text(json.dumps(record), encoding="utf-8")
        assert cache.get(_PAYLOAD) is None

    def test_tampered_value_fails_checksum(self, tmp_path, caplog):
        cache = ResultCache(tmp_path)
        cache.put(_PAYLOAD, ExtReal.of(mpf(3) / 4, 64), 64)
        path = tmp_path / "objects" / cache_key(_PAYLOAD)[:2] / f"{cache_key(_PAYLOAD)}.json"
        record = json.loads(path.read_text(encoding="utf-8"))
        record["value"]["exponent"] += 1
        path.write_text(json.dumps(record), encoding="utf-8")
        with caplog.at_level(logging.WARNING):
            assert cache.get(_PAYLOAD) is None
        assert any(r.event == "cache_corrupt" for r in caplog.records)

    def test_record_without_checksum_is_ignored(self, tmp_path):
        cache = ResultCache(tmp_path)
        cache.put(_PAYLOAD, ExtReal.of(1, 64), 64)
        path = tmp_path / "objects" / cache_key(_PAYLOAD)[:2] / f"{cache_key(_PAYLOAD)}.json"
        record = json.loads(path.read_text(encoding="utf-8"))
        del record["checksum"]
        path.write_text(json.dumps(record), encoding="utf-8")
        assert cache.get(_PAYLOAD) is None

    def test_checksum_stored_with_value(self, tmp_path):
        cache = ResultCache(tmp_path)
        stored = cache.put(_PAYLOAD, ExtReal.of(mp.e, 128), 128)
        path = tmp_path / "objects" / cache_key(_PAYLOAD)[:2] / f"{cache_key(_PAYLOAD)}.json"
        record = json.loads(path.read_text(encoding="utf-8"))
        assert record["checksum"] == cache_key(stored.to_exact())


class TestGetCache:
    def test_rooted_at_configured_directory(self, tmp_path):
        cache = get_cache()
        assert cache.root == tmp_path / "cache"
        assert get_cache() is cache
