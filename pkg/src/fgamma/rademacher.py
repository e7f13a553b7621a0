"""Rademacher complexities: Monte Carlo, exact enumeration and Dudley bounds.

Convention: no absolute value, ``E_sigma sup_psi (1/n) sigma . psi_n(y)``.
A singleton class therefore has complexity exactly 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from . import discriminators as dsc
from ._parallel import ordered_map, task_rng
from .discriminators import BoundedFunctionClass, LipschitzProfile
from .divergence import AscentConfig, as_sample, multi_start
from .generators import DivergenceGenerator, f_star_rprime, require_compatible, rprime_lipschitz


@dataclass(frozen=True)
class RademacherEstimate:
    mean: float
    stderr: float
    draws: int
    inner_solver: str  # "exact-enumeration" | "ascent"
    mode: str  # "enumeration" | "monte-carlo"

    @property
    def label(self) -> str:
        """Ascent-based sups only give lower bounds on the true complexity."""
        return "estimated-lower-bound" if self.inner_solver == "ascent" else "estimated"

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "draws": self.draws,
            "mode": self.mode,
            "inner_solver": self.inner_solver,
            "label": self.label,
        }


def _sup_dictionary(table: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """sup over members for each sign row; table (M, n), sigma (D, n)."""
    n = table.shape[1]
    return (sigma @ table.T / n).max(axis=1)


def _mean_stderr(vals: np.ndarray) -> tuple[float, float]:
    vals = np.asarray(vals, dtype=float)
    if vals.size < 2:
        return float(vals.mean()), 0.0
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size))


def all_sign_patterns(n: int) -> np.ndarray:
    return np.array(list(itertools.product((-1.0, 1.0), repeat=n)))


def empirical_rademacher(
    cls: BoundedFunctionClass,
    points,
    draws: int = 1000,
    seed: int = 0,
    exact: bool = False,
    opt: Optional[AscentConfig] = None,
) -> RademacherEstimate:
    """Empirical Rademacher complexity of ``cls`` at the given points.

    Dictionaries use an exact inner sup; with ``exact=True`` the sign
    vectors are fully enumerated (n <= 20).  Parameterised classes use
    3-restart projected ascent per sign draw and yield a lower estimate.
    """
    if draws < 1:
        raise ValueError("draws must be >= 1")
    y = as_sample(points).points
    n = y.shape[0]
    if cls.kind == "finite-dictionary":
        table = dsc.evaluate_all(cls, y)
        if exact:
            if n > 20:
                raise ValueError("full sign enumeration limited to n <= 20")
            vals = _sup_dictionary(table, all_sign_patterns(n))
            return RademacherEstimate(float(vals.mean()), 0.0, vals.size, "exact-enumeration", "enumeration")
        rng = task_rng(seed, 0)
        sigma = rng.choice((-1.0, 1.0), size=(draws, n))
        mean, se = _mean_stderr(_sup_dictionary(table, sigma))
        return RademacherEstimate(mean, se, draws, "exact-enumeration", "monte-carlo")

    if exact:
        raise ValueError("exact enumeration needs a finite dictionary")
    base = opt or AscentConfig(steps=200, restarts=3, lr=0.05, patience=30)
    k = cls.param_dim

    def one(i: int) -> float:
        rng = task_rng(seed, 1, i)
        sigma = rng.choice((-1.0, 1.0), size=n)
        cot = sigma / n

        def fg(theta):
            h, g = dsc.value_and_gradient(cls, theta, y, cot)
            return float(h @ cot), g

        cfg = AscentConfig(
            steps=base.steps,
            restarts=base.restarts,
            lr=base.lr,
            init_scale=1.0,
            patience=base.patience,
            min_improve=base.min_improve,
            seed=int(rng.integers(2**31)),
        )
        best, _ = multi_start(fg, k, cls.rho, cfg)
        return best.value

    vals = np.array(ordered_map(one, range(draws)))
    mean, se = _mean_stderr(vals)
    return RademacherEstimate(mean, se, draws, "ascent", "monte-carlo")


def rademacher_constant_interval(n: int, alpha: float, beta: float, max_exact_n: int = 30) -> float:
    """((beta - alpha) / 2n) * E|sum sigma| for the class of constants in [alpha, beta]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > max_exact_n:
        raise ValueError(f"exact binomial enumeration limited to n <= {max_exact_n}")
    e_abs = sum(math.comb(n, j) * abs(2 * j - n) for j in range(n + 1)) / 2.0**n
    return (beta - alpha) / (2.0 * n) * e_abs


def dudley_ball_bound(k: int, n: int, el2_root: float, radius: float = 1.0) -> float:
    """48 sqrt(k/n) E[L^2]^(1/2), scaled by the parameter-ball radius."""
    if k < 1 or n < 1 or el2_root < 0:
        raise ValueError("need k >= 1, n >= 1, el2_root >= 0")
    return 48.0 * math.sqrt(k / n) * el2_root * radius


def entropy_integral(k: int, diameter: float, radius: float = 1.0) -> float:
    """Upper value of int_0^D sqrt(log N(eps)) with N(eps) = (1 + 2 radius / eps)^k.

    Quadrature on [delta, D] plus the analytic head bound
    sqrt(2 radius k) * 2 sqrt(delta) on [0, delta], delta = 1e-6 D.
    """
    if diameter <= 0:
        return 0.0
    delta = 1e-6 * diameter

    def integrand(eps):
        return math.sqrt(k * math.log1p(2.0 * radius / eps))

    body, _ = integrate.quad(integrand, delta, diameter, limit=200, epsabs=1e-12, epsrel=1e-10)
    head = math.sqrt(2.0 * radius * k) * 2.0 * math.sqrt(delta)
    return body + head


def dudley_integral_bound(k: int, n: int, el2_root: float, diameter: float, radius: float = 1.0) -> float:
    """12 n^(-1/2) E[L^2]^(1/2) times the ball entropy integral up to ``diameter``."""
    if diameter < 0:
        raise ValueError("diameter must be >= 0")
    return 12.0 / math.sqrt(n) * el2_root * entropy_integral(k, diameter, radius)


def estimate_el2_root(profile: LipschitzProfile, sample) -> float:
    """sqrt(mean L(y_i)^2) over the sample."""
    y = as_sample(sample).points
    L = profile(y)
    return float(math.sqrt(np.mean(L * L)))


def dudley_certificate(cls: BoundedFunctionClass, sample) -> dict:
    """Both Dudley bounds for a parameterised class at a sample."""
    y = as_sample(sample)
    el2 = estimate_el2_root(dsc.lipschitz_profile(cls), y)
    k = cls.param_dim
    return {
        "k": k,
        "n": y.n,
        "rho": cls.rho,
        "el2_root": el2,
        "ball_bound": dudley_ball_bound(k, y.n, el2, cls.rho),
        "integral_bound": dudley_integral_bound(k, y.n, el2, 2.0 * cls.rho, cls.rho),
        "label": "certified",
    }


def k_quantity(gen: DivergenceGenerator, r: float, n: int, alpha: float, beta: float) -> float:
    """ULLN constant K_{f,Psi,P,n} built from a Rademacher value r.

    Uses the min of the Lipschitz-(f*)'_+ branch and the plain branch when
    (f*)'_+ is Lipschitz on [z0 - (beta - alpha), z0 + beta - alpha];
    otherwise the plain branch alone.  Assumes Psi contains a constant.
    """
    require_compatible(gen, alpha, beta)
    if r < 0:
        raise ValueError("Rademacher value must be >= 0")
    w = beta - alpha
    plain = float(f_star_rprime(gen, w + gen.z0)) * (r + w / (2.0 * math.sqrt(n)))
    L = rprime_lipschitz(gen, alpha, beta)
    if L is None:
        return plain
    lip = (1.0 + 2.0 * w * L) * r + w * w * L / (2.0 * math.sqrt(n))
    return min(lip, plain)
