"""Tests for app.numerics.precision and app.numerics.special."""

from __future__ import annotations

import pytest
from mpmath import mp, mpf

from app.core.errors import DomainError
from app.numerics.precision import ExtReal, decimal_digits, resolve_precision, to_decimal
from app.numerics.special import log_barnes_g, log_beta, log_gamma, rising


# ---------------------------------------------------------------------------
# resolve_precision
# ---------------------------------------------------------------------------


class TestResolvePrecision:
    def test_default_from_settings(self):
        assert resolve_precision(None) == 256

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("HANKEL_PRECISION_BITS", "128")
        from app.core.config import get_settings

        get_settings.cache_clear()
        assert resolve_precision(None) == 128

    def test_explicit_value(self):
        assert resolve_precision(96) == 96

    def test_too_small_rejected(self):
        with pytest.raises(DomainError, match="at least 64"):
            resolve_precision(32)


# ---------------------------------------------------------------------------
# ExtReal
# ---------------------------------------------------------------------------


class TestExtReal:
    def test_rounds_to_requested_bits(self):
        x = ExtReal.of(mp.pi, 64)
        with mp.workprec(64):
            assert x.value == +mp.pi
        assert x.precision_bits == 64

    def test_rejects_low_precision(self):
        with pytest.raises(DomainError):
            ExtReal(mpf(1), 53)

    @pytest.mark.parametrize("value", [mpf(0), mpf(-3) / 7, mp.pi * 10**40, mp.e * mpf(10) ** -50])
    def test_exact_form_is_lossless(self, value):
        x = ExtReal.of(value, 256)
        restored = ExtReal.from_exact(x.to_exact())
        assert restored.value == x.value
        assert restored.precision_bits == 256

    def test_decimal_string_carries_digits(self):
        x = ExtReal.of(mpf(1) / 3, 128)
        text = x.to_decimal()
        assert text.startswith("0.3333")
        assert len(text.replace("0.", "")) >= decimal_digits(128) - 2

    def test_float_conversion(self):
        assert float(ExtReal.of(mpf(5) / 2, 64)) == 2.5

    def test_to_decimal_helper(self):
        assert to_decimal(5, 64) == "5.0"


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------


class TestSpecial:
    def test_log_gamma_integer(self):
        assert mp.almosteq(log_gamma(5), mp.log(24))

    def test_log_gamma_domain(self):
        with pytest.raises(DomainError):
            log_gamma(0)

    @pytest.mark.parametrize("x", [1, 2, 3, 4, 6])
    def test_barnes_g_integers(self, x):
        # G(n) = ∏_{k=1}^{n-2} k!
        expected = mpf(1)
        for k in range(1, x - 1):
            expected *= mp.factorial(k)
        assert mp.almosteq(log_barnes_g(x), mp.log(expected))

    @pytest.mark.parametrize("x", [mpf("0.3"), mpf("1.5"), mpf("7.25")])
    def test_barnes_g_matches_mpmath(self, x):
        assert mp.almosteq(log_barnes_g(x), mp.log(mp.barnesg(x)), rel_eps=mpf(10) ** -60)

    def test_barnes_g_large_argument(self):
        # Recurrence G(x+1) = Γ(x) G(x).
        x = mpf("40.5")
        assert mp.almosteq(log_barnes_g(x + 1) - log_barnes_g(x), mp.loggamma(x))

    def test_rising(self):
        assert rising(mpf(3), 4) == 3 * 4 * 5 * 6
        assert rising(mpf("0.5"), 0) == 1

    def test_rising_negative_order(self):
        with pytest.raises(DomainError):
            rising(1, -1)

    def test_log_beta(self):
        assert mp.almosteq(log_beta(2, 3), mp.log(mpf(1) / 12))
