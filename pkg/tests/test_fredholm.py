"""Tests for app.numerics.fredholm."""

from __future__ import annotations

import numpy as np
import pytest
from mpmath import mp

from app.core.errors import DomainError
from app.numerics.fredholm import fredholm_det, fredholm_det_adaptive
from app.numerics.quadrature import gauss_legendre_rule


def _rank_one(x, y):
    return np.sqrt(x * y) * np.ones_like(x * y)


class TestFredholmDet:
    def test_rank_one_kernel(self):
        # det(I - λ K) for K = √x √y on [0,1] is 1 - λ/2
        rule = gauss_legendre_rule(16, 0.0, 1.0)
        value = fredholm_det(_rank_one, lambda x: 0.5 * np.ones_like(x), rule)
        assert mp.almosteq(value, 0.75, rel_eps=1e-12)

    def test_zero_multiplier(self):
        rule = gauss_legendre_rule(8, 0.0, 1.0)
        assert fredholm_det(_rank_one, np.zeros_like, rule) == 1

    def test_negative_multiplier_rejected(self):
        rule = gauss_legendre_rule(8, 0.0, 1.0)
        with pytest.raises(DomainError, match="non-negative"):
            fredholm_det(_rank_one, lambda x: -np.ones_like(x), rule)


class TestAdaptive:
    def test_converges(self):
        def kernel(x, y):
            return np.exp(-(x - y) ** 2)

        result = fredholm_det_adaptive(
            kernel,
            lambda x: 0.3 * np.ones_like(x),
            lambda n: gauss_legendre_rule(n, 0.0, 2.0),
            tolerance=1e-12,
            start=8,
        )
        assert result.converged
        assert result.nodes <= 128
        assert 0 < result.value < 1

    def test_reports_nonconvergence(self, caplog):
        calls = iter([0.5, 0.7])

        def multiplier(x):
            return next(calls) * np.ones_like(x)

        with caplog.at_level("WARNING"):
            result = fredholm_det_adaptive(
                _rank_one,
                multiplier,
                lambda n: gauss_legendre_rule(n, 0.0, 1.0),
                tolerance=1e-14,
                start=32,
                max_nodes=64,
            )
        assert not result.converged
        assert result.nodes == 64
        assert any(getattr(r, "event", None) == "fredholm_not_converged" for r in caplog.records)
