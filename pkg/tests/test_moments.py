"""Tests for app.moments: specs, exact moments, Monte Carlo and large-N limits."""

from __future__ import annotations

from fractions import Fraction
from unittest.mock import patch

import numpy as np
import pytest
import sympy
from mpmath import mp, mpf

from app.bessel.moments import r_moments
from app.combinatorics.expansions import rnk_direct
from app.core.errors import DomainError
from app.ensembles.sampling import MCMCConfig
from app.moments.exact import (
    base_moment_closed,
    derivative_product,
    derivative_ratio_average,
    joint_moment_exact,
    log_base_moment,
)
from app.moments.limits import (
    conjecture_g_factor,
    exponent_slopes,
    leading_order,
    limit_ratio_check,
    ms_limit,
    ratio_closed_form,
    scaled_ratio,
)
from app.moments.montecarlo import derivative_ratios, joint_moment_mc, moment_weights
from app.moments.specs import MomentSpec, bessel_parameter, group_exponent
from app.storage.cache import ResultCache

_SMALL = MCMCConfig(chains=50, burn_in=200, thinning=2)


def _spec(**overrides) -> MomentSpec:
    defaults = {"group": "usp", "n": 2, "h": (2,)}
    defaults.update(overrides)
    return MomentSpec(**defaults)


# ---------------------------------------------------------------------------
# MomentSpec and group constants
# ---------------------------------------------------------------------------


class TestMomentSpec:
    def test_properties(self):
        spec = _spec(h=(1, 2, 0, 1))
        assert spec.s == 4
        assert spec.derivative_exponents == {1: 2, 3: 1}
        assert spec.integer_derivatives
        assert spec.weighted_order == 5

    def test_empty_h_defaults_to_zero(self):
        assert _spec(h=()).h == (0,)

    def test_fractional_derivative_exponent(self):
        assert not _spec(h=(1, 0.5)).integer_derivatives

    @pytest.mark.parametrize(
        "overrides",
        [{"group": "u"}, {"n": 0}, {"h": (1, -1)}],
    )
    def test_invalid(self, overrides):
        with pytest.raises(DomainError):
            _spec(**overrides)

    def test_group_constants(self):
        assert bessel_parameter("usp", 2) == mpf(5) / 2
        assert bessel_parameter("so", 2) == mpf(3) / 2
        assert group_exponent("usp", 2) == 3
        assert group_exponent("so", 2) == 1


# ---------------------------------------------------------------------------
# Exact finite-N moments
# ---------------------------------------------------------------------------


class TestBaseMoment:
    @pytest.mark.parametrize(
        "group, s, expected",
        [("usp", 1, 2), ("usp", 2, 5), ("so", 1, 2), ("so", 2, 6)],
    )
    def test_single_eigenangle_pair(self, group, s, expected):
        # N = 1 reduces to a one-dimensional trigonometric integral
        assert mp.almosteq(base_moment_closed(group, 1, s).value, expected)

    def test_zero_exponent(self):
        assert mp.almosteq(log_base_moment("so", 5, 0), 0)

    def test_not_integrable(self):
        with pytest.raises(DomainError, match="not integrable"):
            log_base_moment("usp", 3, -1.5)

    def test_precision_is_recorded(self):
        assert base_moment_closed("usp", 3, 1.5, precision=128).precision_bits == 128


class TestJointMomentExact:
    def test_no_derivatives_is_base_moment(self):
        got = joint_moment_exact(_spec(n=3, h=(2,)))
        assert mp.almosteq(got.value, base_moment_closed("usp", 3, 2).value)

    def test_first_derivative_ratio_is_n(self):
        # R_{N,1} = N identically
        got = joint_moment_exact(_spec(n=3, h=(1, 1)))
        assert mp.almosteq(got.value, 3 * base_moment_closed("usp", 3, 2).value)

    def test_factorizes_into_base_and_ratio_average(self):
        spec = MomentSpec("so", 2, (0, 0, 2))
        average = derivative_ratio_average(spec)
        assert average > 0
        assert mp.almosteq(
            joint_moment_exact(spec).value,
            base_moment_closed("so", 2, 2).value * average,
        )

    def test_derivative_product_requires_integers(self):
        with pytest.raises(DomainError, match="Monte Carlo"):
            derivative_product(_spec(h=(1, 0.5)))

    def test_derivative_product_evaluates_like_direct_product(self):
        spec = _spec(n=3, h=(0, 0, 1, 1))
        points = [Fraction(1, 2), 2, 3]
        expected = rnk_direct(2, points) * rnk_direct(3, points)
        got = derivative_product(spec).evaluate_inverse(points)
        assert got == sympy.Rational(expected.numerator, expected.denominator)

    def test_cache_round_trip(self, tmp_path):
        cache = ResultCache(tmp_path / "c")
        spec = _spec(n=2, h=(1, 0, 1))
        first = joint_moment_exact(spec, cache=cache)
        assert len(cache) == 1
        with patch("app.moments.exact.derivative_ratio_average") as mock_avg:
            second = joint_moment_exact(spec, cache=cache)
        mock_avg.assert_not_called()
        assert second == first

    def test_cache_key_includes_precision(self, tmp_path):
        cache = ResultCache(tmp_path / "c")
        joint_moment_exact(_spec(), precision=128, cache=cache)
        joint_moment_exact(_spec(), precision=192, cache=cache)
        assert len(cache) == 2


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


class TestMonteCarlo:
    def test_derivative_ratios_match_exact(self):
        x = np.array([[0.5, 2.0, 3.0], [0.1, 0.2, 0.9]])
        got = derivative_ratios(x, 3)
        for row, value in zip(x, got):
            expected = float(rnk_direct(3, [Fraction(v).limit_denominator() for v in row]))
            assert value == pytest.approx(expected, rel=1e-12)

    def test_first_ratio_is_n(self):
        np.testing.assert_allclose(derivative_ratios(np.array([[0.3, 0.7]]), 1), [2.0])

    def test_weights_of_base_moment(self):
        angles = np.array([[np.pi / 2, np.pi]])
        # |φ(0)| = ∏ (2 - 2cos θ_j) = 2 · 4
        assert moment_weights(_spec(h=(1,)), angles)[0] == pytest.approx(8.0)

    def test_too_few_samples(self):
        with pytest.raises(DomainError, match="at least 100"):
            joint_moment_mc(_spec(), 99, seed=1)

    def test_trivial_moment(self):
        estimate = joint_moment_mc(_spec(h=(0,)), 100, seed=1)
        assert estimate.estimate == 1.0
        assert estimate.stderr == 0.0
        assert estimate.samples == 0

    def test_reproducible(self):
        first = joint_moment_mc(_spec(), 500, seed=4, config=_SMALL)
        second = joint_moment_mc(_spec(), 500, seed=4, config=_SMALL)
        assert first.estimate == second.estimate
        assert first.samples == 500

    @pytest.mark.parametrize("h", [(2,), (1, 0, 1)])
    def test_agrees_with_exact(self, h):
        spec = _spec(n=2, h=h)
        exact = float(joint_moment_exact(spec).value)
        estimate = joint_moment_mc(spec, 6000, seed=21, config=_SMALL)
        assert estimate.estimate == pytest.approx(exact, rel=0.1)
        assert estimate.stderr > 0


# ---------------------------------------------------------------------------
# Large-N limits
# ---------------------------------------------------------------------------


class TestLeadingOrder:
    def test_usp_first_moment(self):
        result = leading_order("usp", (1,))
        assert result.exponent == 1
        assert mp.almosteq(result.coefficient.value, 1)

    def test_so_first_moment(self):
        result = leading_order("so", (1,))
        assert result.exponent == 0
        assert mp.almosteq(result.coefficient.value, 2)

    def test_usp_second_moment_against_large_n(self):
        result = leading_order("usp", (2,))
        assert result.exponent == 3
        assert mp.almosteq(result.coefficient.value, mpf(1) / 3)
        n = 2000
        exact = joint_moment_exact(_spec(n=n, h=(2,))).value
        assert mp.almosteq(exact / mpf(n) ** 3, mpf(1) / 3, rel_eps=1e-2)

    def test_derivatives_raise_exponent(self):
        result = leading_order("usp", (0, 0, 2))
        assert result.exponent == group_exponent("usp", 2) + 4
        expected = leading_order("usp", (2,)).coefficient.value * r_moments(2.5, {2: 2})
        assert mp.almosteq(result.coefficient.value, expected)

    def test_fractional_derivative_rejected(self):
        with pytest.raises(DomainError, match="integer"):
            leading_order("so", (1, 0.5))

    def test_ms_limit(self):
        result = ms_limit("usp", 1, 1)
        assert result.h == (0, 1)
        assert result.exponent == 2
        with pytest.raises(DomainError):
            ms_limit("usp", 0, 1)

    def test_exponent_slopes_approach_exponent(self):
        slopes = exponent_slopes(_spec(h=(2,)), [50, 100, 200])
        assert len(slopes) == 2
        assert abs(slopes[-1] - 3) < 0.05


class TestGFactor:
    def test_first_derivative_first_moment(self):
        # l = 0 contributes -2, l = 1 contributes 1; the prefactor is 1
        assert mp.almosteq(conjecture_g_factor(1, 1).value, -1)

    def test_zero_derivative_order(self):
        # only l = (0, …, 0): (-2)^0 · P(s)
        got = conjecture_g_factor(0, 2).value
        assert mp.almosteq(got, leading_order("so", (2,)).coefficient.value / 2)

    def test_invalid(self):
        with pytest.raises(DomainError):
            conjecture_g_factor(-1, 1)


class TestRatios:
    @pytest.mark.parametrize("group", ["usp", "so"])
    @pytest.mark.parametrize("k", [2, 4])
    @pytest.mark.parametrize("s", [2, 3])
    def test_closed_form_is_r_second_moment(self, group, k, s):
        expected = r_moments(bessel_parameter(group, s), {k: 2})
        assert mp.almosteq(ratio_closed_form(group, s, k), expected, rel_eps=mpf(10) ** -40)

    def test_known_values(self):
        assert mp.almosteq(ratio_closed_form("usp", 2, 2), mpf(152) / 105)
        assert mp.almosteq(ratio_closed_form("so", 2, 2), mpf(28) / 15)
        assert mp.almosteq(ratio_closed_form("usp", 2, 4), mpf(289152) / 51975)

    def test_unsupported_order(self):
        with pytest.raises(DomainError, match="k in"):
            ratio_closed_form("usp", 2, 3)

    def test_finite_ratio_routes_agree(self):
        # s >= 2 goes through the joint moment, s < 2 through the weighted average
        near = scaled_ratio("usp", 6, mpf(2) - mpf(10) ** -30, 2)
        at = scaled_ratio("usp", 6, 2, 2)
        assert mp.almosteq(near, at, rel_eps=mpf(10) ** -20)

    def test_finite_ratio_near_limit(self):
        value = scaled_ratio("usp", 40, 2, 2)
        assert abs(value - mpf(152) / 105) < 0.1

    @pytest.mark.parametrize("group, s", [("usp", 0.5), ("so", 1.5)])
    def test_ratio_check_range(self, group, s):
        with pytest.raises(DomainError, match="ratio limit needs"):
            limit_ratio_check(group, s, 2)

    @pytest.mark.slow
    @pytest.mark.parametrize("group, s, k", [("usp", 2, 2), ("so", 2.5, 2), ("usp", 1, 4)])
    def test_ratio_check_converges(self, group, s, k):
        check = limit_ratio_check(group, s, k)
        assert check.gap < 1e-4
        assert not check.uncertain
        assert len(check.points) == 4
