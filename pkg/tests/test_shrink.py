import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shrinklimit.dists import Exponential, HalfNormal, Tabulated
from shrinklimit.errors import DomainError
from shrinklimit.shrink import (
    ShrunkenLaw,
    excess_integral,
    laplace_deficit,
    laplace_shrunken,
    laplace_sum,
    shrunken_cdf,
    u_r,
)


class TestShrinkMap:
    def test_examples(self):
        assert u_r(5, 2) == 3
        assert u_r(1, 2) == 0
        assert u_r(u_r(5, 2), 1) == u_r(5, 3) == 2

    def test_array_input(self):
        np.testing.assert_array_equal(u_r(np.array([0.0, 1.0, 3.5]), 1.0), [0.0, 0.0, 2.5])

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            u_r(-1.0, 0.5)
        with pytest.raises(DomainError):
            u_r(np.array([1.0]), -0.5)

    @given(st.fractions(min_value=0, max_value=100), st.fractions(min_value=0, max_value=50),
           st.fractions(min_value=0, max_value=50))
    def test_semigroup_exact_rationals(self, x, r, s):
        assert u_r(u_r(x, s), r) == u_r(x, r + s)

    @given(st.integers(0, 2**20), st.integers(0, 2**19), st.integers(0, 2**19))
    def test_semigroup_exact_dyadic_floats(self, i, j, k):
        x, r, s = i / 1024, j / 1024, k / 1024
        assert u_r(u_r(x, s), r) == u_r(x, r + s)

    def test_semigroup_random_floats_to_a_few_ulp(self):
        rng = np.random.default_rng(3)
        x, r, s = rng.uniform(0, 10, (3, 10_000))
        lhs = u_r(u_r(x, s), r)
        rhs = u_r(x, r + s)
        np.testing.assert_array_less(np.abs(lhs - rhs), 4 * np.spacing(np.maximum(x, 1.0)))

    @given(st.floats(0, 1e3), st.floats(0, 1e3), st.floats(0, 1e3))
    def test_lipschitz_in_level(self, x, r, s):
        assert abs(u_r(x, r) - u_r(x, s)) <= abs(r - s) * (1 + 1e-12) + 1e-12


class TestShrunkenCdf:
    def test_atom_at_zero(self):
        law = ShrunkenLaw(Exponential(1.0), math.log(2))
        assert shrunken_cdf(law, 0.0) == pytest.approx(0.5, abs=1e-15)
        assert law.atom == pytest.approx(0.5, abs=1e-15)

    def test_zero_level_is_base_cdf(self):
        x = np.linspace(0, 5, 11)
        for d in (Exponential(2.0), HalfNormal()):
            np.testing.assert_array_equal(shrunken_cdf(ShrunkenLaw(d, 0.0), x), d.cdf(x))

    def test_limit_one(self):
        assert shrunken_cdf(ShrunkenLaw(HalfNormal(), 3.0), 1e3) == 1.0

    def test_shift(self):
        d = HalfNormal()
        law = ShrunkenLaw(d, 1.3)
        x = np.linspace(0, 4, 9)
        np.testing.assert_array_equal(shrunken_cdf(law, x), d.cdf(x + 1.3))


class TestLaplaceShrunken:
    def test_examples(self):
        for d in (Exponential(1.0), HalfNormal()):
            assert laplace_shrunken(ShrunkenLaw(d, 1.0), 0.0) == 1.0
        assert laplace_shrunken(ShrunkenLaw(Exponential(1.0), 0.0), 1.0) == pytest.approx(0.5, abs=1e-15)
        law = ShrunkenLaw(Exponential(1.0), math.log(2))
        assert laplace_shrunken(law, 1.0) == pytest.approx(0.75, abs=1e-15)
        assert laplace_shrunken(law, 1.0, method="quad") == pytest.approx(0.75, abs=1e-10)

    def test_rejects_negative_t(self):
        with pytest.raises(DomainError):
            laplace_shrunken(ShrunkenLaw(Exponential(1.0), 1.0), -0.1)

    def test_closed_form_only_for_exponential(self):
        with pytest.raises(DomainError):
            laplace_shrunken(ShrunkenLaw(HalfNormal(), 1.0), 1.0, method="closed")

    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("r", [0.0, 1.0, 3.0])
    def test_closed_form_matches_quadrature(self, lam, r):
        law = ShrunkenLaw(Exponential(lam), r)
        for t in np.round(np.arange(0.1, 10.01, 0.1), 10):
            closed = laplace_shrunken(law, t, method="closed")
            quad = laplace_shrunken(law, t, method="quad")
            assert abs(closed - quad) <= 1e-8

    @pytest.mark.parametrize("d", [Exponential(1.0), HalfNormal(), Tabulated([0, 1, 3], [0, 0.5, 1])], ids=repr)
    def test_monotone_in_t_and_level(self, d):
        ts = np.linspace(0, 10, 21)
        rs = [0.0, 0.5, 1.0, 2.0]
        vals = np.array([[laplace_shrunken(ShrunkenLaw(d, r), t) for t in ts] for r in rs])
        assert np.all(np.diff(vals, axis=1) <= 1e-15)
        assert np.all(np.diff(vals, axis=0) >= -1e-15)
        assert np.all(vals[:, 0] == 1.0)

    @pytest.mark.parametrize("d, r", [(Exponential(1.0), 1.0), (HalfNormal(), 0.7), (Tabulated([0.2, 1, 3], [0.1, 0.5, 1]), 0.5)],
                             ids=["exp", "halfnormal", "tabulated"])
    def test_monte_carlo_consistency(self, d, r):
        m = 100_000
        law = ShrunkenLaw(d, r)
        x = law.sample(np.random.default_rng(17), m)
        for t in (0.3, 1.0, 4.0):
            v = np.exp(-t * x)
            se = v.std(ddof=1) / math.sqrt(m)
            assert abs(v.mean() - laplace_shrunken(law, t)) <= 4 * se


class TestLaplaceSum:
    def test_n_one(self):
        law = ShrunkenLaw(HalfNormal(), 0.4)
        assert laplace_sum(law, 1, 1.3) == pytest.approx(laplace_shrunken(law, 1.3), rel=1e-14)

    def test_t_zero(self):
        assert laplace_sum(ShrunkenLaw(HalfNormal(), 1.0), 10**6, 0.0) == 1.0

    def test_rejects_n_zero(self):
        with pytest.raises(DomainError):
            laplace_sum(ShrunkenLaw(HalfNormal(), 1.0), 0, 1.0)

    def test_large_n_approaches_compound_poisson(self):
        n, a = 10**6, 2.0
        law = ShrunkenLaw(Exponential(1.0), math.log(n / a))
        assert abs(laplace_sum(law, n, 1.0) - math.exp(-1.0)) <= 5e-5

    def test_matches_power_for_moderate_n(self):
        law = ShrunkenLaw(HalfNormal(), 1.1)
        assert laplace_sum(law, 7, 0.9) == pytest.approx(laplace_shrunken(law, 0.9) ** 7, rel=1e-13)


class TestExcessIntegral:
    def test_tabulated_uniform_closed_form(self):
        # uniform on [0, 2]: int_0^{2-r} (1 - e^{-t x}) dx / 2
        d = Tabulated([0.0, 2.0], [0.0, 1.0])
        r, t = 0.5, 1.7
        L = 2.0 - r
        expected = 0.5 * (L - (1 - math.exp(-t * L)) / t)
        assert laplace_deficit(ShrunkenLaw(d, r), t) == pytest.approx(expected, abs=1e-13)

    def test_tabulated_atom_above_level(self):
        d = Tabulated([1.0, 2.0], [0.3, 1.0])
        r = 0.5
        g = lambda x: np.asarray(x) ** 2  # noqa: E731
        # atom 0.3 at x = 0.5, then density 0.7 on (0.5, 1.5]
        expected = 0.3 * 0.25 + 0.7 * (1.5**3 - 0.5**3) / 3
        assert excess_integral(d, g, r) == pytest.approx(expected, abs=1e-13)

    def test_window(self):
        d = Exponential(1.0)
        g = lambda x: np.ones_like(np.asarray(x, dtype=float))  # noqa: E731
        # mass of (1, 2] under dF(x + r) is e^{-r}(e^{-1} - e^{-2})
        assert excess_integral(d, g, 0.7, 1.0, 2.0) == pytest.approx(
            math.exp(-0.7) * (math.exp(-1) - math.exp(-2)), abs=1e-13)

    def test_conditional_scaling_keeps_relative_accuracy(self):
        d = HalfNormal()
        r = 8.0  # sf(r) ~ 1e-15
        g = lambda x: np.ones_like(np.asarray(x, dtype=float))  # noqa: E731
        assert excess_integral(d, g, r) == pytest.approx(d.sf(r), rel=1e-10)
