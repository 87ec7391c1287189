"""Tests for app.hankel: entries, determinants, Laplace moments and the tensor oracle."""

from __future__ import annotations

import pytest
from mpmath import mp, mpf

from app.combinatorics.epoly import EPolynomial
from app.combinatorics.partitions import Partition
from app.core.errors import DomainError, IntegrabilityError
from app.ensembles.averages import inv_e_average
from app.ensembles.spec import EnsembleSpec
from app.hankel.determinants import (
    HankelSpec,
    HankelSystem,
    hankel_det,
    hankel_first_derivative_trace,
    hankel_system,
    hankel_t_derivs,
    sigma_jet,
    sigma_n,
)
from app.hankel.entries import GEntrySpec, g_entries, g_entry, method_tag
from app.hankel.moments import (
    composition_shifts,
    inverse_degree,
    laplace_moment,
    laplace_t_derivs,
    normalize_powers,
)
from app.hankel.oracle import tensor_quadrature_moment

_EPS = mpf(10) ** -40


def _central(f, t, order: int = 1, h: str = "1e-12"):
    """Central difference; f may round its result to the default precision."""
    t, h = mpf(t), mpf(h)
    if order == 1:
        return (f(t + h) - f(t - h)) / (2 * h)
    return (f(t + h) - 2 * f(t) + f(t - h)) / h**2


# ---------------------------------------------------------------------------
# Entries
# ---------------------------------------------------------------------------


class TestEntries:
    def test_closed_form_at_zero(self):
        # g_m(0) = Γ(a+2N-1-m)/Γ(a+2N+b-m)
        got = g_entries(2, 2.5, 0.5, 0, 2)
        expected = [mp.gamma(5.5 - m) / mp.gamma(7 - m) for m in range(3)]
        for g, e in zip(got, expected):
            assert mp.almosteq(g, e, rel_eps=_EPS)

    def test_derivative_shifts_index(self):
        t = mpf("0.8")
        got = _central(lambda s: g_entries(2, 3, 0.5, s, 1)[0], t)
        expected = -g_entries(2, 3, 0.5, t, 1)[1]
        assert mp.almosteq(got, expected, rel_eps=mpf(10) ** -20)

    def test_quadrature_matches_confluent(self):
        t = mpf("0.7")
        confluent = g_entries(2, 2.5, 0.5, t, 3, precision=64, method="confluent")
        quadrature = g_entries(2, 2.5, 0.5, t, 3, precision=64, method="quadrature")
        for c, q in zip(confluent, quadrature):
            assert abs(c - q) <= 1e-12 * abs(c)

    def test_single_entry(self):
        spec = GEntrySpec(n=2, a=2.5, b=0.5, m=1, t=0.3)
        assert mp.almosteq(g_entry(spec), g_entries(2, 2.5, 0.5, 0.3, 1)[1], rel_eps=_EPS)

    def test_method_tags(self):
        assert method_tag(0, "quadrature") == "closed-form-t0"
        assert method_tag(1, "quadrature") == "quadrature-entry"
        assert method_tag(1, "confluent") == "confluent-entry"
        assert method_tag(1, "auto") == "confluent-entry"

    def test_divergent_index(self):
        with pytest.raises(IntegrabilityError, match="diverges"):
            g_entries(1, 0.5, 0.5, 0, 2)

    @pytest.mark.parametrize(
        "args",
        [
            (0, 1, 1, 0, 0),
            (1, 1, -1, 0, 0),
            (1, 1, 1, -0.5, 0),
            (1, 1, 1, 0, -1),
        ],
    )
    def test_invalid_ranges(self, args):
        n, a, b, t, m = args
        with pytest.raises(DomainError):
            g_entries(n, a, b, t, m)


# ---------------------------------------------------------------------------
# Determinants
# ---------------------------------------------------------------------------


class TestHankelDeterminants:
    def test_single_row_is_entry(self):
        spec = HankelSpec(1, 2, 1, t=0.5)
        assert mp.almosteq(hankel_det(spec), g_entries(1, 2, 1, 0.5, 0)[0], rel_eps=_EPS)

    def test_column_shifts(self):
        spec = HankelSpec(3, 4, 1, shift=Partition((2, 1)))
        assert spec.column_shifts() == (0, 1, 2)

    def test_shift_too_long(self):
        with pytest.raises(DomainError, match="rows"):
            HankelSpec(1, 4, 1, shift=Partition((1, 1)))

    def test_checked_determinant_agrees(self):
        spec = HankelSpec(3, 2.5, 0.5, t=1)
        assert mp.almosteq(hankel_det(spec), hankel_det(spec, check=True), rel_eps=_EPS)

    def test_replacement_ratio_matches_shifted_determinant(self):
        n, a, b, t = 3, 4.5, 0.5, mpf("0.6")
        base = hankel_det(HankelSpec(n, a, b, t=t))
        shifted = hankel_det(HankelSpec(n, a, b, shift=Partition((2, 1)), t=t))
        with mp.workprec(320):
            system = hankel_system(n, a, b, t, 2, 320)
            ratio = system.replacement_ratio({1: 2, 2: 4})
            assert system.replacement_ratio({0: 0}) == 1
        assert mp.almosteq(ratio, shifted / base, rel_eps=mpf(10) ** -30)

    def test_replacement_onto_unmoved_column_is_zero(self):
        with mp.workprec(320):
            system = hankel_system(2, 3.5, 0.5, mpf("0.5"), 2, 320)
            assert system.column(1) == [0, 1]
            # column 0 → v_1 duplicates the untouched column 1
            assert system.replacement_ratio({0: 1, 1: 1}) == 0

    def test_not_enough_entries(self):
        with pytest.raises(DomainError, match="entries"):
            HankelSystem(2, [mpf(1), mpf(2)])


class TestTDerivatives:
    def test_first_derivative_three_ways(self):
        spec = HankelSpec(3, 3.5, 0.5, t=mpf("0.9"))
        _, d1 = hankel_t_derivs(spec, 1)
        trace = hankel_first_derivative_trace(spec)
        numeric = _central(lambda s: hankel_det(HankelSpec(3, 3.5, 0.5, t=s)), spec.t)
        assert mp.almosteq(d1, trace, rel_eps=mpf(10) ** -30)
        assert mp.almosteq(d1, numeric, rel_eps=mpf(10) ** -20)

    def test_second_derivative(self):
        spec = HankelSpec(2, 4, 1, t=mpf("1.2"))
        values = hankel_t_derivs(spec, 2)
        numeric = _central(lambda s: hankel_det(HankelSpec(2, 4, 1, t=s)), spec.t, 2, "1e-10")
        assert mp.almosteq(values[2], numeric, rel_eps=mpf(10) ** -15)

    def test_third_derivative_with_coinciding_columns(self):
        # N = 3, order 3 includes allocations that move a column onto an unmoved one
        spec = HankelSpec(3, 3.5, -0.5, t=mpf("1.5"))
        third = hankel_t_derivs(spec, 3)[3]
        numeric = _central(
            lambda s: hankel_t_derivs(HankelSpec(3, 3.5, -0.5, t=s), 2)[2], spec.t
        )
        assert mp.almosteq(third, numeric, rel_eps=mpf(10) ** -20)

    def test_rejects_shift(self):
        spec = HankelSpec(2, 4, 1, shift=Partition((1,)))
        with pytest.raises(DomainError, match="unshifted"):
            hankel_t_derivs(spec, 1)

    def test_rejects_negative_order(self):
        with pytest.raises(DomainError):
            hankel_t_derivs(HankelSpec(2, 4, 1), -1)

    def test_order_limited_by_integrability(self):
        with pytest.raises(IntegrabilityError):
            hankel_t_derivs(HankelSpec(1, 1.5, 1), 3)

    def test_sigma_jet_consistent(self):
        # an mpf t keeps the jet and the difference quotient at the same point
        t = mpf("0.8")
        jet = sigma_jet(2, 3.5, 0.5, t)
        assert mp.almosteq(jet.sigma, sigma_n(2, 3.5, 0.5, t), rel_eps=mpf(10) ** -30)
        numeric = _central(lambda s: sigma_n(2, 3.5, 0.5, s), t)
        assert mp.almosteq(jet.d1, numeric, rel_eps=mpf(10) ** -20)

    def test_sigma_vanishes_at_zero(self):
        assert sigma_n(2, 3.5, 0.5, 0) == 0


# ---------------------------------------------------------------------------
# Laplace moments
# ---------------------------------------------------------------------------


class TestPowers:
    def test_normalize_drops_zeros_and_sorts(self):
        assert normalize_powers({3: 1, 1: 0, 2: 2}) == {2: 2, 3: 1}
        assert normalize_powers(None) == {}

    @pytest.mark.parametrize("powers", [{0: 1}, {2: -1}])
    def test_normalize_rejects(self, powers):
        with pytest.raises(DomainError):
            normalize_powers(powers)

    def test_inverse_degree(self):
        assert inverse_degree({1: 2, 3: 1}) == 5

    def test_composition_shifts(self):
        assert composition_shifts(2, {1: 2}) == {(2, 0): 1, (1, 1): 2, (0, 2): 1}
        assert composition_shifts(2, {2: 1}) == {(2, 0): 1, (0, 2): 1}
        assert composition_shifts(3, {}) == {(0, 0, 0): 1}


class TestLaplaceMoment:
    @pytest.mark.parametrize("n, a, b", [(1, 0.5, 0.5), (2, 2.5, -0.5), (4, 1, 3)])
    def test_normalized_at_zero(self, n, a, b):
        result = laplace_moment(n, a, b, 0)
        assert mp.almosteq(result.value, 1, rel_eps=_EPS)
        assert result.method == "closed-form-t0"
        assert result.term_count == 1

    @pytest.mark.parametrize(
        "powers, poly",
        [
            ({1: 1}, EPolynomial.e(1)),
            ({2: 1}, EPolynomial.monomial((1, 1)) + EPolynomial.e(2) * -2),
            ({1: 2}, EPolynomial.monomial((1, 1))),
        ],
    )
    def test_matches_schur_average_at_zero(self, powers, poly):
        spec = EnsembleSpec.jacobi(3, 4.5, 0.5)
        got = laplace_moment(3, 4.5, 0.5, 0, powers).value
        assert mp.almosteq(got, inv_e_average(spec, poly), rel_eps=mpf(10) ** -35)

    def test_integrability(self):
        with pytest.raises(IntegrabilityError, match="a > "):
            laplace_moment(2, 1, 0.5, 0.5, {2: 1})

    def test_decreasing_in_t(self):
        values = [laplace_moment(2, 2.5, 0.5, t).value for t in (0, 0.5, 1, 2)]
        assert all(x > y for x, y in zip(values, values[1:]))

    def test_t_derivative_is_minus_p1(self):
        t = mpf("0.4")
        e, d1 = laplace_t_derivs(2, 3.5, 0.5, t, 1)
        assert mp.almosteq(e, laplace_moment(2, 3.5, 0.5, t).value, rel_eps=_EPS)
        expected = -laplace_moment(2, 3.5, 0.5, t, {1: 1}).value
        assert mp.almosteq(d1, expected, rel_eps=mpf(10) ** -35)


class TestOracle:
    @pytest.mark.parametrize(
        "n, powers",
        [(1, None), (2, None), (2, {1: 1}), (2, {2: 1}), (3, {1: 1})],
    )
    def test_exact_at_zero(self, n, powers):
        # at t = 0 the integrand is a polynomial against the rule's weight
        oracle = tensor_quadrature_moment(n, 3.5, 0.5, 0, powers, nodes=8)
        hankel = laplace_moment(n, 3.5, 0.5, 0, powers, precision=128).value
        assert abs(oracle.value - hankel) < 1e-25
        assert oracle.nodes == 16

    @pytest.mark.parametrize("n", [1, 2])
    @pytest.mark.parametrize("t", ["0", "0.5", "1"])
    def test_p2_moment_against_tensor_rule(self, n, t):
        t = mpf(t)
        oracle = tensor_quadrature_moment(n, 5, 0.5, t, {2: 1}, nodes=64)
        hankel = laplace_moment(n, 5, 0.5, t, {2: 1}, precision=128).value
        assert abs(oracle.value - hankel) <= 1e-8 * abs(hankel)

    def test_matches_hankel_at_positive_t(self):
        oracle = tensor_quadrature_moment(1, 3.5, 0.5, 0.5, {1: 1}, nodes=64)
        hankel = laplace_moment(1, 3.5, 0.5, 0.5, {1: 1}, precision=128).value
        assert oracle.error_estimate < 1e-6
        assert abs(oracle.value - hankel) < 1e-8

    def test_size_limit(self):
        with pytest.raises(DomainError, match="N <= 3"):
            tensor_quadrature_moment(4, 3.5, 0.5, 0.5)

    def test_integrability(self):
        with pytest.raises(DomainError):
            tensor_quadrature_moment(1, 1, 0.5, 0.5, {2: 1})
