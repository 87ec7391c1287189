"""Tests for app.core.logging."""

from __future__ import annotations

import json
import logging
import sys

from mpmath import mpf

from app.core.logging import JSONFormatter, setup_logging


def _record(**extra) -> logging.LogRecord:
    record = logging.LogRecord("app.test", logging.INFO, __file__, 1, "hello %s", ("world",), None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


class TestJSONFormatter:
    def test_basic_fields(self):
        payload = json.loads(JSONFormatter().format(_record()))
        assert payload["level"] == "INFO"
        assert payload["logger"] == "app.test"
        assert payload["message"] == "hello world"
        assert "timestamp" in payload

    def test_known_extras_are_merged(self):
        payload = json.loads(JSONFormatter().format(_record(event="suite_start", nodes=12)))
        assert payload["event"] == "suite_start"
        assert payload["nodes"] == 12

    def test_unknown_extras_are_dropped(self):
        payload = json.loads(JSONFormatter().format(_record(secret="x")))
        assert "secret" not in payload

    def test_mpf_values_become_strings(self):
        payload = json.loads(JSONFormatter().format(_record(residual=mpf(1) / 4)))
        assert payload["residual"] == "0.25"

    def test_exception_is_included(self):
        try:
            raise ValueError("boom")
        except ValueError:
            record = _record()
            record.exc_info = sys.exc_info()
        payload = json.loads(JSONFormatter().format(record))
        assert "boom" in payload["exception"]


class TestSetupLogging:
    def test_single_stderr_handler(self):
        root = logging.getLogger()
        saved_handlers, saved_level = list(root.handlers), root.level
        try:
            setup_logging("debug")
            setup_logging("INFO")
            assert len(root.handlers) == 1
            assert isinstance(root.handlers[0].formatter, JSONFormatter)
            assert root.level == logging.INFO
        finally:
            root.handlers[:] = saved_handlers
            root.setLevel(saved_level)
