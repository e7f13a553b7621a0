"""Generalized cumulant generating function on empirical vectors.

``Lambda_f(x) = inf_nu { nu + mean_i f*(x_i - nu) }``.  Bounded inputs let
the infimum be taken over the compact bracket ``[min x - z0, max x - z0]``,
which is where all minimisation here happens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .generators import (
    DivergenceGenerator,
    f_star,
    f_star_rprime,
    require_compatible,
)

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class LambdaResult:
    value: float
    nu_star: float
    iterations: int
    bracket: tuple[float, float]


def default_tol(alpha: float, beta: float) -> float:
    return 1e-10 * max(1.0, beta - alpha)


def _golden_rows(obj, lo: np.ndarray, hi: np.ndarray, tol: float, max_iter: int = 400):
    """Vectorised golden-section search; ``obj`` maps an (r,) array of points to (r,) values.

    Returns (argmin, min value, iterations).  Endpoints are included as
    candidates so minima on the bracket boundary are exact.
    """
    a = lo.astype(float).copy()
    b = hi.astype(float).copy()
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = obj(c)
    fd = obj(d)
    it = 0
    while it < max_iter and np.any(b - a > tol):
        it += 1
        left = fc <= fd
        # shrink to [a, d] where left, else [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - _INVPHI * (b - a)
        new_d = a + _INVPHI * (b - a)
        old_c, old_fc, old_d, old_fd = c, fc, d, fd
        c = np.where(left, new_c, old_d)
        d = np.where(left, old_c, new_d)
        probe = np.where(left, c, d)
        fprobe = obj(probe)
        fc = np.where(left, fprobe, old_fd)
        fd = np.where(left, old_fc, fprobe)
    mid = 0.5 * (a + b)
    cands = np.stack([c, d, mid, lo, hi])
    vals = np.stack([fc, fd, obj(mid), obj(lo), obj(hi)])
    k = np.argmin(vals, axis=0)
    cols = np.arange(lo.shape[0])
    return cands[k, cols], vals[k, cols], it


def lambda_rows(
    values: np.ndarray,
    gen: DivergenceGenerator,
    weights: Optional[np.ndarray] = None,
    tol: Optional[float] = None,
):
    """Lambda_f for every row of a 2-D array at once.

    ``weights`` (summing to 1 along the last axis) turns each row into a
    discrete measure rather than a uniform empirical one.  Returns
    (values, nu_star, lo, hi, iterations).
    """
    x = np.atleast_2d(np.asarray(values, dtype=float))
    if x.shape[-1] == 0:
        raise ValueError("Lambda_f needs at least one value")
    if weights is None:
        w = np.full(x.shape[-1], 1.0 / x.shape[-1])
    else:
        w = np.asarray(weights, dtype=float)
    xmin = x.min(axis=1)
    xmax = x.max(axis=1)
    width = float((xmax - xmin).max())
    require_compatible(gen, 0.0, width)
    lo = xmin - gen.z0
    hi = xmax - gen.z0
    if tol is None:
        tol = default_tol(0.0, width)

    def obj(nu):
        return nu + np.sum(w * f_star(gen, x - nu[:, None]), axis=-1)

    nu, val, it = _golden_rows(obj, lo, hi, tol)
    # f*(z) >= z puts the value between the mean and the max of the inputs
    mean = x.mean(axis=1) if weights is None else np.sum(w * x, axis=-1)
    val = np.clip(val, mean, np.maximum(mean, xmax))
    val = np.where(xmax == xmin, mean, val)
    return val, nu, lo, hi, it


def lambda_empirical(values, gen: DivergenceGenerator, tol: Optional[float] = None) -> LambdaResult:
    """Lambda_f on one empirical vector, with the minimising shift."""
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("lambda_empirical: empty vector")
    if tol is not None and not tol > 0:
        raise ValueError("tol must be positive")
    val, nu, lo, hi, it = lambda_rows(x[None, :], gen, tol=tol)
    return LambdaResult(float(val[0]), float(nu[0]), int(it), (float(lo[0]), float(hi[0])))


def lambda_discrete(values, probs, gen: DivergenceGenerator, tol: Optional[float] = None) -> float:
    """Lambda_f^P for a discrete P with atoms' test values ``values`` and masses ``probs``."""
    probs = np.asarray(probs, dtype=float)
    x = np.asarray(values, dtype=float)
    keep = probs > 0
    val, *_ = lambda_rows(np.atleast_2d(x)[:, keep], gen, weights=probs[keep], tol=tol)
    return float(val[0]) if np.ndim(values) == 1 else val


def log_mean_exp(values) -> float:
    """KL closed form of Lambda_f, used as an oracle."""
    x = np.asarray(values, dtype=float)
    m = x.max()
    return float(m + np.log(np.mean(np.exp(x - m))))


def lambda_lipschitz_const(gen: DivergenceGenerator, alpha: float, beta: float) -> float:
    """(f*)'_+(z0 + beta - alpha): the L^1 Lipschitz constant of Lambda_f on [alpha, beta]."""
    require_compatible(gen, alpha, beta)
    return float(f_star_rprime(gen, gen.z0 + beta - alpha))


@dataclass(frozen=True)
class PerturbationConstant:
    value: float
    z_star: float
    raw: float
    clamped: bool


def delta_objective(gen: DivergenceGenerator, n: int, width: float, z):
    """n(-z + (n-1)/n f*(z) + f*(width + z)/n)."""
    z = np.asarray(z, dtype=float)
    return -n * z + (n - 1) * f_star(gen, z) + f_star(gen, width + z)


def delta_f_detail(
    gen: DivergenceGenerator, n: int, alpha: float, beta: float, tol: Optional[float] = None
) -> PerturbationConstant:
    if n < 1:
        raise ValueError("delta_f requires n >= 1")
    require_compatible(gen, alpha, beta)
    w = float(beta - alpha)
    if w == 0:
        return PerturbationConstant(0.0, gen.z0, 0.0, False)
    if tol is None:
        tol = default_tol(alpha, beta)
    lo = np.array([gen.z0 - w])
    hi = np.array([gen.z0])
    z, val, _ = _golden_rows(lambda z: delta_objective(gen, n, w, z), lo, hi, tol)
    raw = float(val[0])
    upper = float(f_star(gen, w + gen.z0)) - gen.z0
    value = min(max(raw, w), upper)
    return PerturbationConstant(value, float(z[0]), raw, value != raw)


def delta_f(gen: DivergenceGenerator, n: int, alpha: float, beta: float, tol: Optional[float] = None) -> float:
    """Tight per-coordinate perturbation constant Delta_{f,n} of Lambda_f on [alpha, beta]^n."""
    return delta_f_detail(gen, n, alpha, beta, tol).value


def perturbation_extremal_gap(
    gen: DivergenceGenerator, n: int, alpha: float, beta: float, tol: Optional[float] = None
) -> float:
    """Lambda_f(x~) - Lambda_f(x) for x = (alpha,...,alpha) and one coordinate of x~ set to beta."""
    if n < 1:
        raise ValueError("n must be >= 1")
    require_compatible(gen, alpha, beta)
    x = np.full(n, float(alpha))
    xt = x.copy()
    xt[0] = beta
    t = tol if tol is not None else 1e-13 * max(1.0, beta - alpha)
    return lambda_empirical(xt, gen, t).value - lambda_empirical(x, gen, t).value


def envelope_weights(values, nu_star: float, gen: DivergenceGenerator) -> np.ndarray:
    """d Lambda_f / d x_i = (f*)'_+(x_i - nu*) / n at the minimising shift."""
    x = np.asarray(values, dtype=float)
    return f_star_rprime(gen, x - nu_star) / x.size
