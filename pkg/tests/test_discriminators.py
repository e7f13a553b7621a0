"""Bounded discriminator classes, generator maps and their Lipschitz profiles."""

import math

import numpy as np
import pytest
from oracles import ARCHITECTURES, central_difference, envelope_gradient_error, gradient_error, rel_error

from fgamma import discriminators as dsc
from fgamma.generators import make_generator


class TestEvaluate:
    def test_dictionary_constant_member(self):
        cls = dsc.dictionary_class([0.0, 1.0, 2.0], [[0.4, 0.4, 0.4], [0.0, 0.5, 1.0]])
        np.testing.assert_array_equal(dsc.evaluate(cls, 0, [2.0, 0.0, 1.0]), [0.4, 0.4, 0.4])
        np.testing.assert_array_equal(dsc.evaluate(cls, 1, [2.0, 0.0]), [1.0, 0.0])

    def test_zero_weights_give_midpoint(self):
        cls = dsc.mlp_class([2, 5, 1], rho=1.0, range=(-1.0, 3.0))
        out = dsc.evaluate(cls, np.zeros(cls.param_dim), np.random.default_rng(0).standard_normal((4, 2)))
        np.testing.assert_array_equal(out, np.full(4, 1.0))

    def test_linear_identity_at_origin(self):
        cls = dsc.linear_class(1, "identity", rho=1.0, range=(0.0, 1.0))
        assert dsc.evaluate(cls, np.array([1.0]), [0.0])[0] == 0.5
        assert dsc.evaluate(cls, np.array([1.0]), [0.3])[0] == pytest.approx(0.5 * (math.tanh(0.3) + 1))

    def test_errors(self):
        cls = dsc.mlp_class([2, 3, 1], rho=1.0)
        with pytest.raises(ValueError):
            dsc.evaluate(cls, np.full(cls.param_dim, 1.0), np.zeros((1, 2)))
        with pytest.raises(ValueError):
            dsc.evaluate(cls, np.zeros(cls.param_dim), np.zeros((1, 3)))
        d = dsc.constant_dictionary([0.0, 1.0], [0.0, 1.0])
        with pytest.raises(ValueError):
            dsc.evaluate(d, 0, [0.5])
        with pytest.raises(ValueError):
            dsc.evaluate(d, 5, [0.0])

    def test_dictionary_needs_constant(self):
        with pytest.raises(ValueError):
            dsc.dictionary_class([0.0, 1.0], [[0.0, 1.0]])

    def test_dictionary_range_check(self):
        with pytest.raises(ValueError):
            dsc.dictionary_class([0.0, 1.0], [[0.5, 0.5], [0.0, 2.0]], range=(0.0, 1.0))


class TestRangeCertification:
    @pytest.mark.parametrize("name,make", ARCHITECTURES, ids=[a[0] for a in ARCHITECTURES])
    def test_random_probes_stay_in_range(self, name, make):
        cls = make()
        rng = np.random.default_rng(1)
        for _ in range(20):
            theta = dsc.sample_ball(rng, cls.param_dim, cls.rho)
            x = 50 * rng.standard_normal((5000, cls.input_dim))
            h = dsc.evaluate(cls, theta, x)
            assert h.min() >= cls.alpha and h.max() <= cls.beta

    def test_saturated_outputs_hit_bounds_exactly(self):
        cls = dsc.linear_class(1, "identity", rho=1.0, range=(0.0, 1.0))
        h = dsc.evaluate(cls, np.array([1.0]), [-1e3, 1e3])
        np.testing.assert_array_equal(h, [0.0, 1.0])


class TestGradient:
    @pytest.mark.parametrize("name,make", ARCHITECTURES, ids=[a[0] for a in ARCHITECTURES])
    def test_matches_central_difference(self, name, make):
        cls = make()
        for seed in range(3):
            assert gradient_error(cls, seed) <= 1e-5

    @pytest.mark.parametrize("name,make", ARCHITECTURES, ids=[a[0] for a in ARCHITECTURES])
    def test_zero_cotangent(self, name, make):
        cls = make()
        theta = np.zeros(cls.param_dim)
        x = np.ones((3, cls.input_dim))
        np.testing.assert_array_equal(dsc.gradient(cls, theta, x, np.zeros(3)), 0.0)

    @pytest.mark.parametrize("name,make", ARCHITECTURES, ids=[a[0] for a in ARCHITECTURES])
    def test_input_gradient(self, name, make):
        cls = make()
        rng = np.random.default_rng(4)
        theta = dsc.sample_ball(rng, cls.param_dim, cls.rho, 0.8)
        x = rng.standard_normal((1, cls.input_dim))
        g = dsc.input_gradient(cls, theta, x, np.ones(1))[0]
        fd = central_difference(lambda y: float(dsc.evaluate(cls, theta, y[None, :])[0]), x[0])
        assert rel_error(g, fd) <= 1e-5

    @pytest.mark.parametrize("name,make", ARCHITECTURES, ids=[a[0] for a in ARCHITECTURES])
    def test_linearize_agrees(self, name, make):
        cls = make()
        rng = np.random.default_rng(5)
        theta = dsc.sample_ball(rng, cls.param_dim, cls.rho, 0.8)
        x = rng.standard_normal((6, cls.input_dim))
        cot = rng.standard_normal(6)
        h, vjp = dsc.linearize(cls, theta, x)
        np.testing.assert_allclose(h, dsc.evaluate(cls, theta, x), rtol=0, atol=0)
        np.testing.assert_allclose(vjp(cot)[0], dsc.gradient(cls, theta, x, cot), rtol=1e-14, atol=1e-15)

    @pytest.mark.parametrize("spec", ["kl", "alpha:2", "js"])
    @pytest.mark.parametrize("name,make", ARCHITECTURES, ids=[a[0] for a in ARCHITECTURES])
    def test_envelope_gradient(self, spec, name, make):
        cls = make()
        gen = make_generator(spec)
        if cls.beta - cls.alpha >= math.log(2) and spec == "js":
            pytest.skip("range too wide for js")
        for seed in range(2):
            assert envelope_gradient_error(gen, cls, seed) <= 1e-5

    def test_dictionary_not_differentiable(self):
        d = dsc.constant_dictionary([0.0], [0.0])
        with pytest.raises(TypeError):
            dsc.gradient(d, 0, [0.0], [1.0])


class TestLipschitzProfile:
    def test_rho_zero(self):
        prof = dsc.lipschitz_profile(dsc.mlp_class([2, 4, 1], rho=0.0))
        assert prof.a == 0 and prof.b == 0
        np.testing.assert_array_equal(prof(np.ones((3, 2))), 0.0)

    def test_linear_affine_explicit(self):
        prof = dsc.lipschitz_profile(dsc.linear_class(2, "affine", rho=3.0, range=(0.0, 1.0)))
        assert (prof.a, prof.b) == (0.5, 0.5)

    def test_dictionary_rejected(self):
        with pytest.raises(TypeError):
            dsc.lipschitz_profile(dsc.constant_dictionary([0.0], [0.0]))

    @pytest.mark.parametrize("name,make", ARCHITECTURES, ids=[a[0] for a in ARCHITECTURES])
    def test_sound_against_probes(self, name, make):
        cls = make()
        prof = dsc.lipschitz_profile(cls)
        rng = np.random.default_rng(6)
        y = 2 * rng.standard_normal((100, cls.input_dim))
        bound = prof(y)
        t1 = np.array([dsc.sample_ball(rng, cls.param_dim, cls.rho) for _ in range(1000)])
        # half the pairs are close, which probes the local slope
        t2 = np.array([
            dsc.project_ball(t + (1e-3 if i % 2 else 1.0) * rng.standard_normal(cls.param_dim), cls.rho)
            for i, t in enumerate(t1)
        ])
        h1 = np.stack([dsc.evaluate(cls, t, y) for t in t1])
        h2 = np.stack([dsc.evaluate(cls, t, y) for t in t2])
        dist = np.linalg.norm(t1 - t2, axis=1)[:, None]
        ratio = np.abs(h1 - h2) / np.maximum(dist, 1e-300)
        assert np.all(ratio.max(axis=0) <= bound * (1 + 1e-9))

    def test_two_layer_unit_input(self):
        cls = dsc.mlp_class([1, 4, 1], rho=1.0)
        bound = dsc.lipschitz_profile(cls)(np.ones((1, 1)))[0]
        rng = np.random.default_rng(8)
        worst = 0.0
        for _ in range(1000):
            a = dsc.sample_ball(rng, cls.param_dim, 1.0)
            b = dsc.sample_ball(rng, cls.param_dim, 1.0)
            d = np.linalg.norm(a - b)
            worst = max(worst, abs(dsc.evaluate(cls, a, [1.0])[0] - dsc.evaluate(cls, b, [1.0])[0]) / d)
        assert 0 < worst <= bound


class TestGeneratorMap:
    def test_push_vjp(self):
        gmap = dsc.generator_map([2, 5, 3], rho=4.0)
        rng = np.random.default_rng(9)
        theta = dsc.sample_ball(rng, gmap.param_dim, gmap.rho, 0.5)
        z = rng.standard_normal((7, 2))
        cot = rng.standard_normal((7, 3))
        out, g = dsc.push_vjp(gmap, theta, z, cot)
        np.testing.assert_array_equal(out, dsc.push(gmap, theta, z))
        fd = central_difference(lambda t: float(np.sum(cot * dsc.push(gmap, t, z))), theta)
        assert rel_error(g, fd) <= 1e-5

    def test_composite_profile_sound(self):
        cls = dsc.mlp_class([1, 4, 1], rho=1.0)
        gmap = dsc.generator_map([2, 3, 1], rho=2.0)
        prof = dsc.composite_lipschitz_profile(cls, gmap)
        rng = np.random.default_rng(10)
        z = rng.standard_normal((20, 2))
        bound = prof(z)
        for _ in range(300):
            p1, p2 = (dsc.sample_ball(rng, cls.param_dim, 1.0) for _ in range(2))
            g1, g2 = (dsc.sample_ball(rng, gmap.param_dim, 2.0) for _ in range(2))
            h1 = dsc.evaluate(cls, p1, dsc.push(gmap, g1, z))
            h2 = dsc.evaluate(cls, p2, dsc.push(gmap, g2, z))
            d = math.sqrt(np.sum((p1 - p2) ** 2) + np.sum((g1 - g2) ** 2))
            assert np.all(np.abs(h1 - h2) / d <= bound)
        assert dsc.composite_radius(cls, gmap) == pytest.approx(math.sqrt(5))


class TestBall:
    def test_projection(self):
        v = np.array([3.0, 4.0])
        np.testing.assert_allclose(dsc.project_ball(v, 1.0), [0.6, 0.8])
        np.testing.assert_array_equal(dsc.project_ball(v, 10.0), v)

    def test_sample_ball_inside(self):
        rng = np.random.default_rng(11)
        for k in (1, 3, 20):
            for _ in range(100):
                assert np.linalg.norm(dsc.sample_ball(rng, k, 2.0, 0.5)) <= 1.0 + 1e-12
