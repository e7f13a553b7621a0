"""Legendre transforms of the built-in divergence generators."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fgamma.generators import (
    BUILTIN_SPECS,
    IncompatibleGeneratorError,
    check_compatibility,
    custom_generator,
    f_star,
    f_star_rprime,
    legendre_dual,
    make_generator,
    require_compatible,
    rprime_lipschitz,
    validate_generator,
)

E = math.e


class TestMakeGenerator:
    def test_kl_conjugate(self):
        g = make_generator("kl")
        z = np.linspace(-3, 3, 13)
        np.testing.assert_allclose(f_star(g, z), np.exp(z - 1), rtol=1e-15)
        assert g.z0 == 1.0

    def test_js_conjugate(self):
        g = make_generator("js")
        z = np.linspace(-3, 0.6, 13)
        np.testing.assert_allclose(f_star(g, z), -np.log(2 - np.exp(z)), rtol=1e-14)
        assert g.z0 == 0.0
        assert f_star(g, math.log(2)) == math.inf
        assert f_star(g, 1.0) == math.inf

    def test_alpha2_conjugate(self):
        g = make_generator("alpha:2")
        z = np.linspace(-3, 3, 13)
        np.testing.assert_allclose(f_star(g, z), np.maximum(z, 0) ** 2 / 2 + 0.5, rtol=1e-14)
        assert g.z0 == 1.0
        assert f_star(g, -3.0) == 0.5

    @pytest.mark.parametrize("text", ["alpha:2", "alpha(2)", "alpha:2.0"])
    def test_alpha_spellings(self, text):
        assert make_generator(text).spec == "alpha:2"

    def test_alpha_keyword(self):
        assert make_generator("alpha", alpha=3).spec == "alpha:3"

    @pytest.mark.parametrize("bad", ["alpha:1", "alpha:0.5", "alpha:-2", "tv", "", "alpha:x"])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            make_generator(bad)

    def test_passthrough(self):
        g = make_generator("kl")
        assert make_generator(g) is g


class TestDerivative:
    def test_values(self):
        assert f_star_rprime(make_generator("kl"), 1.0) == pytest.approx(1.0, abs=1e-15)
        assert f_star_rprime(make_generator("kl"), 2.0) == pytest.approx(E, rel=1e-15)
        assert f_star_rprime(make_generator("alpha:2"), 3.0) == pytest.approx(3.0, rel=1e-15)

    def test_outside_domain(self):
        with pytest.raises(ValueError):
            f_star_rprime(make_generator("js"), math.log(2))

    @pytest.mark.parametrize("spec", BUILTIN_SPECS)
    def test_matches_central_difference(self, spec):
        g = make_generator(spec)
        z = np.linspace(g.z0 - 2, min(g.z0 + 2, g.fstar_finite_sup - 0.05), 50)
        z = z[np.abs(z) > 1e-3]  # the alpha family has a kink at 0
        h = 1e-6
        num = (f_star(g, z + h) - f_star(g, z - h)) / (2 * h)
        np.testing.assert_allclose(f_star_rprime(g, z), num, rtol=1e-6, atol=1e-8)


class TestConjugateIdentities:
    @pytest.mark.parametrize("spec", BUILTIN_SPECS)
    def test_fixed_point(self, spec):
        g = make_generator(spec)
        assert abs(f_star(g, g.z0) - g.z0) <= 1e-9
        assert abs(f_star_rprime(g, g.z0) - 1.0) <= 1e-9

    @pytest.mark.parametrize("spec", BUILTIN_SPECS)
    def test_dominates_identity_and_monotone(self, spec):
        g = make_generator(spec)
        rng = np.random.default_rng(0)
        z = np.sort(rng.uniform(g.z0 - 6, min(g.z0 + 4, g.fstar_finite_sup - 1e-6), 10_000))
        fz = f_star(g, z)
        assert np.all(fz >= z - 1e-12)
        assert np.all(np.diff(fz) >= -1e-12)
        assert np.all(np.diff(f_star_rprime(g, z)) >= -1e-12)

    @pytest.mark.parametrize("spec", BUILTIN_SPECS)
    def test_legendre_round_trip(self, spec):
        g = make_generator(spec)
        for t in np.linspace(0.05, 3.0, 100):
            assert legendre_dual(g, t) == pytest.approx(float(g.f(np.asarray(t))), abs=1e-6)

    @given(st.floats(min_value=1.01, max_value=8.0), st.floats(min_value=-4.0, max_value=4.0))
    @settings(max_examples=200, deadline=None)
    def test_alpha_family_dominates(self, a, z):
        g = make_generator("alpha", alpha=a)
        assert f_star(g, z) >= z - 1e-12


class TestLipschitz:
    def test_examples(self):
        assert rprime_lipschitz(make_generator("kl"), 0, 1) == pytest.approx(E, rel=1e-14)
        assert rprime_lipschitz(make_generator("alpha:2"), 0, 1) == pytest.approx(1.0, rel=1e-14)
        assert rprime_lipschitz(make_generator("kl"), 0, 0) == 0.0

    def test_alpha_gt_2_not_lipschitz_at_zero(self):
        # (f*)' = (2z)^(1/2) has unbounded slope at 0
        assert rprime_lipschitz(make_generator("alpha:3"), 0, 1) is None

    def test_alpha_gt_2_away_from_zero(self):
        g = make_generator("alpha:3")
        L = rprime_lipschitz(g, 0.0, 0.2)  # interval [0.3, 0.7]
        z = np.linspace(0.3, 0.7, 2001)
        d = f_star_rprime(g, z)
        assert np.max(np.abs(np.diff(d)) / np.diff(z)) <= L + 1e-12

    @pytest.mark.parametrize("spec", ["kl", "js", "alpha:1.5", "alpha:2"])
    def test_bounds_difference_quotients(self, spec):
        g = make_generator(spec)
        w = 0.5 if spec == "js" else 1.0
        L = rprime_lipschitz(g, 0.0, w)
        z = np.linspace(g.z0 - w, g.z0 + w, 4001)
        d = f_star_rprime(g, z)
        assert np.max(np.abs(np.diff(d)) / np.diff(z)) <= L * (1 + 1e-9)

    def test_escaping_interval(self):
        with pytest.raises(IncompatibleGeneratorError):
            rprime_lipschitz(make_generator("js"), 0, 1)


class TestCompatibility:
    def test_examples(self):
        msg = check_compatibility(make_generator("js"), 0, 1)
        assert msg is not None and "0.693" in msg
        assert check_compatibility(make_generator("js"), 0, 0.5) is None
        assert check_compatibility(make_generator("kl"), -10, 10) is None

    def test_require(self):
        with pytest.raises(IncompatibleGeneratorError):
            require_compatible(make_generator("js"), 0, 1)

    def test_empty_range(self):
        assert check_compatibility(make_generator("kl"), 1, 0) is not None


class TestCustomGenerator:
    def test_pearson_chi2_matches_alpha2(self):
        # f(t) = (t - 1)^2 / 2 restricted to t >= 0 has the alpha(2) conjugate on z >= 0
        g = custom_generator(
            "chi2-half",
            f=lambda t: 0.5 * (t - 1.0) ** 2,
            f_star_fn=lambda z: np.where(z >= -1.0, 0.5 * z**2 + z, -0.5),
            f_star_rprime_fn=lambda z: np.where(z >= -1.0, z + 1.0, 0.0),
            z0=0.0,
        )
        assert validate_generator(g).passed
        assert rprime_lipschitz(g, 0, 1) == pytest.approx(1.05, rel=1e-9)

    def test_rejects_broken_identity(self):
        with pytest.raises(ValueError):
            custom_generator(
                "broken",
                f=lambda t: t * np.log(t),
                f_star_fn=lambda z: np.exp(z),
                f_star_rprime_fn=lambda z: np.exp(z),
                z0=1.0,
            )
