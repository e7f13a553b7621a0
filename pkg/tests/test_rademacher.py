"""Rademacher complexities, Dudley bounds and the K quantity."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fgamma import discriminators as dsc
from fgamma.discriminators import LipschitzProfile
from fgamma.divergence import AscentConfig
from fgamma.generators import f_star_rprime, make_generator
from fgamma.rademacher import (
    dudley_ball_bound,
    dudley_certificate,
    dudley_integral_bound,
    empirical_rademacher,
    entropy_integral,
    estimate_el2_root,
    k_quantity,
    rademacher_constant_interval,
)

E = math.e


def enumerate_rademacher(table):
    """Average over all 2^n sign vectors of max_j (1/n) sigma . table[j]."""
    n = table.shape[1]
    vals = [max(np.dot(s, row) / n for row in table) for s in itertools.product((-1, 1), repeat=n)]
    return float(np.mean(vals))


class TestConstantInterval:
    def test_examples(self):
        assert rademacher_constant_interval(1, 0, 1) == 0.5
        assert rademacher_constant_interval(2, 0, 1) == 0.25
        assert rademacher_constant_interval(7, 0.3, 0.3) == 0.0

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
    def test_matches_enumeration(self, n):
        cls = dsc.constant_dictionary(np.arange(n, dtype=float), [0.0, 1.0])
        y = np.arange(n, dtype=float)
        est = empirical_rademacher(cls, y, exact=True)
        assert est.mean == pytest.approx(rademacher_constant_interval(n, 0, 1), abs=1e-14)
        assert est.mean == pytest.approx(enumerate_rademacher(cls.table), abs=1e-14)

    def test_limits(self):
        with pytest.raises(ValueError):
            rademacher_constant_interval(31, 0, 1)
        with pytest.raises(ValueError):
            rademacher_constant_interval(0, 0, 1)


class TestEmpiricalRademacher:
    def test_singleton_is_zero(self):
        cls = dsc.dictionary_class([0.0, 1.0, 2.0], [[0.5, 0.5, 0.5]])
        assert empirical_rademacher(cls, [0.0, 1.0, 2.0], exact=True).mean == 0.0

    def test_mc_within_three_stderr(self):
        rng = np.random.default_rng(31)
        for i in range(6):
            n = int(rng.integers(2, 9))
            table = rng.uniform(0, 1, (6, n))
            table[0] = 0.4
            cls = dsc.dictionary_class(np.arange(n, dtype=float), table)
            y = np.arange(n, dtype=float)
            ex = enumerate_rademacher(table)
            mc = empirical_rademacher(cls, y, draws=4000, seed=i)
            assert abs(mc.mean - ex) <= 3 * mc.stderr
            assert mc.mode == "monte-carlo" and mc.draws == 4000

    def test_stderr_definition(self):
        cls = dsc.dictionary_class([0.0, 1.0], [[0.5, 0.5], [0.0, 1.0]])
        est = empirical_rademacher(cls, [0.0, 1.0, 1.0, 0.0], draws=500, seed=3)
        assert est.stderr > 0 and math.isfinite(est.mean)

    def test_parameterised_labelled_lower_bound(self):
        cls = dsc.linear_class(1, "affine", 1.0)
        est = empirical_rademacher(cls, np.linspace(-1, 1, 10), draws=5, seed=0,
                                   opt=AscentConfig(steps=30, restarts=2))
        assert est.inner_solver == "ascent"
        assert est.label == "estimated-lower-bound"

    def test_deterministic(self):
        cls = dsc.mlp_class([1, 3, 1], 1.0)
        y = np.linspace(-1, 1, 12)
        opt = AscentConfig(steps=20, restarts=2)
        a = empirical_rademacher(cls, y, draws=4, seed=9, opt=opt)
        b = empirical_rademacher(cls, y, draws=4, seed=9, opt=opt)
        assert a == b

    def test_errors(self):
        cls = dsc.constant_dictionary([0.0], [0.0])
        with pytest.raises(ValueError):
            empirical_rademacher(cls, [0.0], draws=0)
        with pytest.raises(ValueError):
            empirical_rademacher(dsc.mlp_class([1, 2, 1]), [0.0], exact=True)


class TestDudley:
    def test_ball_examples(self):
        assert dudley_ball_bound(4, 100, 1.0) == pytest.approx(9.6, rel=1e-15)
        assert dudley_ball_bound(1, 1, 1.0) == 48.0
        assert dudley_ball_bound(5, 10, 0.0) == 0.0

    def test_integral_examples(self):
        assert dudley_integral_bound(3, 100, 1.0, 0.0) == 0.0
        v1 = dudley_integral_bound(1, 100, 1.0, 2.0)
        v4 = dudley_integral_bound(4, 100, 1.0, 2.0)
        assert 0 < v1 <= 4.8
        assert v1 <= v4 <= 9.6

    @pytest.mark.parametrize("k", range(1, 17))
    def test_closed_bound(self, k):
        assert entropy_integral(k, 2.0) <= 4 * math.sqrt(k)

    def test_quadrature_against_substitution(self):
        # eps = 2 / (e^u - 1) turns the integral into one over u in [log 2, inf)
        from scipy import integrate

        def g(u):
            return math.sqrt(u) * 2 * math.exp(u) / (math.exp(u) - 1) ** 2

        ref, _ = integrate.quad(g, math.log(2), 60, limit=400)
        head = math.sqrt(2.0) * 2 * math.sqrt(2e-6)  # analytic bound used on [0, 1e-6 D]
        assert ref <= entropy_integral(1, 2.0) <= ref + head + 1e-8

    def test_el2_examples(self):
        assert estimate_el2_root(LipschitzProfile(0.0, 0.0), np.ones((3, 2))) == 0.0
        assert estimate_el2_root(LipschitzProfile(0.0, 1.0), np.array([[3.0, 4.0]])) == 5.0
        assert estimate_el2_root(LipschitzProfile(1.0, 0.0), np.ones((4, 1))) == 1.0

    def test_mc_below_certificate(self):
        rng = np.random.default_rng(32)
        matrix = [
            dsc.linear_class(1, "affine", 1.0),
            dsc.linear_class(2, "identity", 2.0),
            dsc.mlp_class((1, 3, 1), 1.0),
            dsc.mlp_class((2, 4, 1), 2.0),
            dsc.mlp_class((1, 4, 4, 1), 1.5),
        ]
        opt = AscentConfig(steps=60, restarts=3, lr=0.05, patience=30)
        for j, cls in enumerate(matrix):
            y = rng.normal(size=(30, cls.input_dim))
            est = empirical_rademacher(cls, y, draws=20, seed=j, opt=opt)
            cert = dudley_certificate(cls, y)
            assert est.mean <= cert["ball_bound"] + 3 * est.stderr
            assert cert["integral_bound"] <= cert["ball_bound"]


class TestKQuantity:
    def test_kl_example(self):
        lip = (1 + 2 * E) * 0.1 + E / 20
        plain = E * (0.1 + 0.05)
        assert k_quantity(make_generator("kl"), 0.1, 100, 0, 1) == pytest.approx(min(lip, plain), rel=1e-14)
        assert k_quantity(make_generator("kl"), 0.1, 100, 0, 1) == pytest.approx(0.40774227, rel=1e-7)

    def test_zero_width_reduces_to_r(self):
        # beta = alpha gives L = 0 and (f*)'(z0) = 1
        assert k_quantity(make_generator("kl"), 0.37, 10, 0.5, 0.5) == pytest.approx(0.37)

    def test_vanishes(self):
        assert k_quantity(make_generator("alpha:2"), 0.0, 10**12, 0, 1) < 1e-6

    def test_non_lipschitz_branch(self):
        g = make_generator("alpha:3")
        want = f_star_rprime(g, 1 + g.z0) * (0.2 + 1 / (2 * math.sqrt(50)))
        assert k_quantity(g, 0.2, 50, 0, 1) == pytest.approx(want, rel=1e-14)

    @given(st.floats(0, 2), st.floats(0, 2), st.floats(0.01, 1.5))
    @settings(max_examples=200, deadline=None)
    def test_monotone_in_r_and_width(self, r1, r2, w):
        g = make_generator("kl")
        lo, hi = sorted((r1, r2))
        assert k_quantity(g, lo, 40, 0, w) <= k_quantity(g, hi, 40, 0, w) + 1e-15
        assert k_quantity(g, lo, 40, 0, w) <= k_quantity(g, lo, 40, 0, w + 0.1) + 1e-15

    def test_negative_r(self):
        with pytest.raises(ValueError):
            k_quantity(make_generator("kl"), -0.1, 10, 0, 1)
