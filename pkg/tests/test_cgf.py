"""Cumulant functional Lambda_f on empirical vectors and the perturbation constant."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fgamma.cgf import (
    delta_f,
    delta_f_detail,
    delta_objective,
    envelope_weights,
    lambda_discrete,
    lambda_empirical,
    lambda_lipschitz_const,
    lambda_rows,
    log_mean_exp,
    perturbation_extremal_gap,
)
from fgamma.generators import IncompatibleGeneratorError, f_star, f_star_rprime, make_generator

KL = make_generator("kl")
JS = make_generator("js")
A2 = make_generator("alpha:2")
CASES = [(KL, 0.0, 1.0), (JS, 0.0, 0.5), (A2, 0.0, 1.0), (make_generator("alpha:3"), -0.5, 0.5)]


def grid_lambda(x, gen, lo, hi, points=100_001):
    nu = np.linspace(lo, hi, points)
    vals = nu + np.mean(f_star(gen, x[None, :] - nu[:, None]), axis=1)
    return vals.min()


class TestLambdaExamples:
    def test_constant_vector(self):
        assert lambda_empirical(np.full(7, 0.3), KL).value == 0.3

    def test_kl_two_points(self):
        r = lambda_empirical([0.0, math.log(3)], KL)
        assert r.value == pytest.approx(math.log(2), abs=1e-10)

    def test_alpha2_two_points(self):
        r = lambda_empirical([0.0, 2.0], A2)
        assert r.value == pytest.approx(1.5, abs=1e-10)
        assert r.nu_star == pytest.approx(0.0, abs=1e-6)

    def test_bracket_and_bounds(self):
        x = np.array([0.2, 0.9, 0.4])
        r = lambda_empirical(x, KL)
        assert r.bracket == (pytest.approx(0.2 - 1), pytest.approx(0.9 - 1))
        assert r.bracket[0] <= r.nu_star <= r.bracket[1]
        assert x.min() <= r.value <= x.max()

    def test_errors(self):
        with pytest.raises(ValueError):
            lambda_empirical([], KL)
        with pytest.raises(IncompatibleGeneratorError):
            lambda_empirical([0.0, 1.0], JS)
        with pytest.raises(ValueError):
            lambda_empirical([0.0, 1.0], KL, tol=0.0)


class TestLambdaOracles:
    def test_kl_matches_log_mean_exp(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            x = rng.uniform(0, 1, rng.integers(1, 65))
            assert abs(lambda_empirical(x, KL).value - log_mean_exp(x)) <= 1e-9

    @pytest.mark.parametrize("gen,a,b", CASES, ids=lambda c: getattr(c, "spec", str(c)))
    def test_compact_bracket_matches_wide_grid(self, gen, a, b):
        rng = np.random.default_rng(7)
        for _ in range(10):
            x = rng.uniform(a, b, rng.integers(2, 20))
            wide = grid_lambda(x, gen, a - gen.z0 - 10, b - gen.z0 + 10)
            assert abs(lambda_empirical(x, gen).value - wide) <= 1e-6

    def test_rows_agree_with_single(self):
        rng = np.random.default_rng(3)
        x = rng.uniform(0, 1, (6, 9))
        vals, nus, *_ = lambda_rows(x, A2)
        for i in range(6):
            r = lambda_empirical(x[i], A2)
            assert vals[i] == pytest.approx(r.value, abs=1e-10)

    def test_weighted_matches_repetition(self):
        x = np.array([0.1, 0.7])
        rep = lambda_empirical([0.1, 0.1, 0.1, 0.7], KL).value
        assert lambda_discrete(x, [0.75, 0.25], KL) == pytest.approx(rep, abs=1e-10)

    def test_envelope_weights_are_gradient(self):
        rng = np.random.default_rng(5)
        x = rng.uniform(0, 1, 12)
        r = lambda_empirical(x, KL)
        w = envelope_weights(x, r.nu_star, KL)
        assert w.sum() == pytest.approx(1.0, abs=1e-7)
        h = 1e-6
        num = np.array([
            (lambda_empirical(x + h * e, KL).value - lambda_empirical(x - h * e, KL).value) / (2 * h)
            for e in np.eye(12)
        ])
        np.testing.assert_allclose(w, num, rtol=1e-5, atol=1e-8)


class TestLambdaProperties:
    @given(
        arrays(np.float64, st.integers(1, 30), elements=st.floats(0, 1)),
        st.floats(-5, 5),
    )
    @settings(max_examples=200, deadline=None)
    def test_shift_equivariance(self, x, c):
        for gen in (KL, A2):
            assert lambda_empirical(x + c, gen).value == pytest.approx(
                lambda_empirical(x, gen).value + c, abs=1e-9
            )

    @given(
        arrays(np.float64, 10, elements=st.floats(0, 0.3)),
        arrays(np.float64, 10, elements=st.floats(0, 0.3)),
    )
    @settings(max_examples=200, deadline=None)
    def test_monotone(self, x, d):
        for gen in (KL, JS, A2):
            assert lambda_empirical(x, gen).value <= lambda_empirical(x + d, gen).value + 1e-10

    @given(arrays(np.float64, st.integers(1, 30), elements=st.floats(0, 1)))
    @settings(max_examples=200, deadline=None)
    def test_between_mean_and_max(self, x):
        for gen in (KL, A2):
            v = lambda_empirical(x, gen).value
            assert x.mean() - 1e-12 <= v <= x.max() + 1e-12

    @pytest.mark.parametrize("gen,a,b", CASES, ids=lambda c: getattr(c, "spec", str(c)))
    def test_lipschitz_bound(self, gen, a, b):
        rng = np.random.default_rng(11)
        L = lambda_lipschitz_const(gen, a, b)
        n = 8
        x = rng.uniform(a, b, (2000, n))
        y = rng.uniform(a, b, (2000, n))
        lx = lambda_rows(x, gen)[0]
        ly = lambda_rows(y, gen)[0]
        assert np.all(np.abs(lx - ly) <= L * np.mean(np.abs(x - y), axis=1) + 1e-9)


class TestLipschitzConst:
    def test_examples(self):
        assert lambda_lipschitz_const(KL, 0, 1) == pytest.approx(math.e, rel=1e-15)
        assert lambda_lipschitz_const(A2, 0, 1) == pytest.approx(2.0, rel=1e-15)
        assert lambda_lipschitz_const(KL, 0, 0) == pytest.approx(1.0, rel=1e-15)


class TestDelta:
    def test_kl_n1(self):
        assert abs(delta_f(KL, 1, 0, 1) - 1.0) <= 1e-9

    @pytest.mark.parametrize("gen", [KL, JS, A2])
    def test_degenerate(self, gen):
        assert delta_f(gen, 5, 0.2, 0.2) == 0.0

    def test_kl_n10_grid(self):
        z = np.linspace(1 - 1, 1, 100_001)
        grid = delta_objective(KL, 10, 1.0, z).min()
        d = delta_f(KL, 10, 0, 1)
        assert 1.0 <= d <= math.e - 1
        assert d == pytest.approx(grid, abs=1e-6)

    @pytest.mark.parametrize("gen,a,b", CASES[:3], ids=["kl", "js", "alpha2"])
    def test_sandwich(self, gen, a, b):
        w = b - a
        upper = f_star(gen, w + gen.z0) - gen.z0
        loose = f_star_rprime(gen, w + gen.z0) * w
        for n in range(1, 101):
            d = delta_f(gen, n, a, b)
            assert w - 1e-12 <= d <= upper + 1e-12
        assert upper <= loose + 1e-12

    def test_increasing_in_n(self):
        vals = [delta_f(KL, n, 0, 1) for n in (1, 2, 5, 20, 100, 1000)]
        assert np.all(np.diff(vals) >= -1e-9)
        # the large-n limit is the upper end of the sandwich
        assert vals[-1] == pytest.approx(math.e - 1, abs=5e-3)

    def test_detail_flags(self):
        r = delta_f_detail(KL, 10, 0, 1)
        assert r.value == delta_f(KL, 10, 0, 1)
        assert r.z_star <= KL.z0

    def test_errors(self):
        with pytest.raises(ValueError):
            delta_f(KL, 0, 0, 1)
        with pytest.raises(IncompatibleGeneratorError):
            delta_f(JS, 3, 0, 1)


class TestPerturbation:
    def test_kl_n1(self):
        assert perturbation_extremal_gap(KL, 1, 0, 1) == pytest.approx(1.0, abs=1e-9)

    def test_alpha2_n4(self):
        assert perturbation_extremal_gap(A2, 4, 0, 1) == pytest.approx(delta_f(A2, 4, 0, 1) / 4, abs=1e-6)

    def test_degenerate(self):
        assert perturbation_extremal_gap(KL, 6, 0.4, 0.4) == 0.0

    @pytest.mark.parametrize("gen,a,b", CASES[:3], ids=["kl", "js", "alpha2"])
    @pytest.mark.parametrize("n", [1, 2, 4, 10, 100])
    def test_extremal_attains(self, gen, a, b, n):
        gap = perturbation_extremal_gap(gen, n, a, b)
        assert gap == pytest.approx(delta_f(gen, n, a, b) / n, abs=1e-6)

    @pytest.mark.parametrize("gen,a,b", CASES[:3], ids=["kl", "js", "alpha2"])
    def test_random_single_coordinate(self, gen, a, b):
        rng = np.random.default_rng(13)
        for n in (1, 3, 10):
            bound = delta_f(gen, n, a, b) / n
            x = rng.uniform(a, b, (500, n))
            y = x.copy()
            y[:, 0] = rng.uniform(a, b, 500)
            diff = np.abs(lambda_rows(y, gen)[0] - lambda_rows(x, gen)[0])
            assert np.all(diff <= bound + 1e-9)
