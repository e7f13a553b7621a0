"""Variational estimation of D_f^Gamma(Q_n || P_m) and reference divergences."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from . import discriminators as dsc
from .cgf import envelope_weights, lambda_empirical, lambda_rows
from .discriminators import BoundedFunctionClass
from .generators import DivergenceGenerator, f_star_rprime, require_compatible


# ---------------------------------------------------------------------------
# Samples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sample:
    """Uniform-weight empirical measure on the rows of ``points``."""

    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("a sample needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("sample contains non-finite values")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.n

    @classmethod
    def from_csv(cls, source: Union[str, Path, io.TextIOBase]) -> "Sample":
        """One point per row, comma separated; a non-numeric first row is a header."""
        if isinstance(source, (str, Path)):
            with open(source, newline="", encoding="utf-8") as fh:
                return cls.from_csv(fh)
        rows = [r for r in csv.reader(source) if r and any(c.strip() for c in r)]
        if not rows:
            raise ValueError("empty CSV sample")
        try:
            [float(c) for c in rows[0]]
        except ValueError:
            rows = rows[1:]
        try:
            data = [[float(c) for c in r] for r in rows]
        except ValueError as exc:
            raise ValueError(f"malformed CSV sample: {exc}") from None
        if not data or len({len(r) for r in data}) != 1:
            raise ValueError("malformed CSV sample: ragged or empty rows")
        return cls(np.array(data))

    def to_csv(self, path: Union[str, Path]) -> None:
        header = ",".join(f"x{i}" for i in range(self.dim))
        np.savetxt(path, self.points, delimiter=",", header=header, comments="", fmt="%.17g")


def as_sample(x) -> Sample:
    return x if isinstance(x, Sample) else Sample(np.asarray(x, dtype=float))


# ---------------------------------------------------------------------------
# Projected ascent
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AscentConfig:
    steps: int = 400
    restarts: int = 5
    lr: float = 0.05
    init_scale: float = 0.1
    patience: int = 50
    min_improve: float = 1e-10
    seed: int = 0


@dataclass
class AscentRun:
    theta: np.ndarray
    value: float
    init_value: float
    trace: list[float]


def projected_ascent(
    fun_grad: Callable[[np.ndarray], tuple[float, np.ndarray]],
    theta0: np.ndarray,
    rho: float,
    cfg: AscentConfig,
) -> AscentRun:
    """Adam-scaled gradient ascent with projection onto the rho-ball.

    Keeps the best iterate seen, so the result never falls below the
    starting objective.
    """
    theta = dsc.project_ball(np.asarray(theta0, dtype=float).copy(), rho)
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    b1, b2, eps = 0.9, 0.999, 1e-12
    val, g = fun_grad(theta)
    best_val, best_theta = val, theta.copy()
    init_val = val
    trace = [val]
    last_gain_at = 0
    ref = best_val
    for t in range(1, cfg.steps + 1):
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        step = cfg.lr * (m / (1 - b1**t)) / (np.sqrt(v / (1 - b2**t)) + eps)
        theta = dsc.project_ball(theta + step, rho)
        val, g = fun_grad(theta)
        if not math.isfinite(val):
            raise FloatingPointError("non-finite objective during ascent")
        trace.append(val)
        if val > best_val:
            best_val, best_theta = val, theta.copy()
        if best_val > ref + cfg.min_improve:
            ref = best_val
            last_gain_at = t
        elif t - last_gain_at >= cfg.patience:
            break
    return AscentRun(best_theta, best_val, init_val, trace)


def multi_start(
    fun_grad,
    k: int,
    rho: float,
    cfg: AscentConfig,
    extra_starts: tuple[np.ndarray, ...] = (),
) -> tuple[AscentRun, list[AscentRun]]:
    """Run ``cfg.restarts`` seeded restarts (plus fixed extra starts); max wins, lowest index on ties."""
    runs = []
    for start in extra_starts:
        runs.append(projected_ascent(fun_grad, start, rho, cfg))
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        runs.append(projected_ascent(fun_grad, dsc.sample_ball(rng, k, rho, cfg.init_scale), rho, cfg))
    best = max(range(len(runs)), key=lambda i: (runs[i].value, -i))
    return runs[best], runs


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------


@dataclass
class EstimateResult:
    value: float
    theta_star: Union[np.ndarray, int]
    nu_star: float
    ascent_trace: list[float]
    restarts_used: int
    restart_values: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        th = self.theta_star
        return {
            "value": self.value,
            "nu_star": self.nu_star,
            "theta_star": int(th) if np.ndim(th) == 0 else [float(t) for t in th],
            "restarts_used": self.restarts_used,
            "restart_values": list(self.restart_values),
            "ascent_trace_len": len(self.ascent_trace),
        }


def variational_objective(gen, cls, theta, q, p) -> tuple[float, float]:
    """E_{Q_n}[h] - Lambda_f^{P_m}[h] at one parameter; returns (value, nu*)."""
    hq = dsc.evaluate(cls, theta, q.points)
    hp = dsc.evaluate(cls, theta, p.points)
    lam = lambda_empirical(hp, gen)
    return float(hq.mean() - lam.value), lam.nu_star


def objective_and_gradient(gen, cls, theta, q, p):
    """Objective and its envelope gradient (nu held at its minimiser)."""
    hq, gq = dsc.value_and_gradient(cls, theta, q.points, np.full(q.n, 1.0 / q.n))
    hp, vjp = dsc.linearize(cls, theta, p.points)
    lam = lambda_empirical(hp, gen)
    gp = vjp(envelope_weights(hp, lam.nu_star, gen))[0]
    return float(hq.mean() - lam.value), gq - gp, lam.nu_star


def _dictionary_objectives(gen, cls, q, p):
    tq = dsc.evaluate_all(cls, q.points)
    tp = dsc.evaluate_all(cls, p.points)
    lam, nu, *_ = lambda_rows(tp, gen)
    return tq.mean(axis=1) - lam, nu


def estimate_divergence_exact(gen: DivergenceGenerator, cls: BoundedFunctionClass, q, p) -> float:
    """Exact max over dictionary members of E_{Q_n}[h] - Lambda_f^{P_m}[h]."""
    if cls.kind != "finite-dictionary":
        raise TypeError("exact enumeration needs a finite dictionary")
    require_compatible(gen, cls.alpha, cls.beta)
    vals, _ = _dictionary_objectives(gen, cls, as_sample(q), as_sample(p))
    return float(vals.max())


def estimate_divergence(
    gen: DivergenceGenerator,
    cls: BoundedFunctionClass,
    q,
    p,
    opt: Optional[AscentConfig] = None,
) -> EstimateResult:
    """Lower estimate of D_f^Gamma(Q_n || P_m) over a discriminator class.

    Dictionaries are enumerated exactly (first member wins ties).  For
    parameterised classes the constant member theta = 0 is always probed,
    so the estimate is >= 0 up to solver tolerance.
    """
    q, p = as_sample(q), as_sample(p)
    require_compatible(gen, cls.alpha, cls.beta)
    if cls.kind == "finite-dictionary":
        vals, nus = _dictionary_objectives(gen, cls, q, p)
        j = int(np.argmax(vals))
        return EstimateResult(float(vals[j]), j, float(nus[j]), [], 0, [float(v) for v in vals])
    opt = opt or AscentConfig()

    def fg(theta):
        v, g, _ = objective_and_gradient(gen, cls, theta, q, p)
        return v, g

    zero = np.zeros(cls.param_dim)
    best, runs = multi_start(fg, cls.param_dim, cls.rho, opt, extra_starts=(zero,))
    value, nu = variational_objective(gen, cls, best.theta, q, p)
    return EstimateResult(
        value,
        best.theta,
        nu,
        best.trace,
        len(runs),
        [r.value for r in runs],
    )


def estimate_ipm(cls: BoundedFunctionClass, q, p, opt: Optional[AscentConfig] = None) -> float:
    """sup_h E_{Q_n}[h] - E_{P_m}[h]; exact for dictionaries, ascent lower bound otherwise."""
    q, p = as_sample(q), as_sample(p)
    if cls.kind == "finite-dictionary":
        return float((dsc.evaluate_all(cls, q.points).mean(axis=1) - dsc.evaluate_all(cls, p.points).mean(axis=1)).max())
    opt = opt or AscentConfig()

    def fg(theta):
        hq, gq = dsc.value_and_gradient(cls, theta, q.points, np.full(q.n, 1.0 / q.n))
        hp, gp = dsc.value_and_gradient(cls, theta, p.points, np.full(p.n, 1.0 / p.n))
        return float(hq.mean() - hp.mean()), gq - gp

    best, _ = multi_start(fg, cls.param_dim, cls.rho, opt, extra_starts=(np.zeros(cls.param_dim),))
    return best.value


def _check_probs(v, name):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or np.any(v < 0) or abs(v.sum() - 1.0) > 1e-12:
        raise ValueError(f"{name} is not a probability vector")
    return v


def f_divergence_discrete(gen: DivergenceGenerator, q_probs, p_probs) -> float:
    """sum_i p_i f(q_i / p_i) with the usual boundary conventions.

    p_i = 0 < q_i contributes q_i * lim_{t->inf} f(t)/t, which equals the
    supremum of the finiteness domain of f* (+inf for kl and alpha, log 2
    for js).
    """
    q = _check_probs(q_probs, "q_probs")
    p = _check_probs(p_probs, "p_probs")
    if q.shape != p.shape:
        raise ValueError("q_probs and p_probs differ in length")
    total = 0.0
    both = (p > 0) & (q > 0)
    total += float(np.sum(p[both] * gen.f(q[both] / p[both])))
    only_p = (p > 0) & (q == 0)
    if np.any(only_p):
        total += float(np.sum(p[only_p])) * gen.f_at_zero
    only_q = (p == 0) & (q > 0)
    if np.any(only_q):
        total += float(np.sum(q[only_q])) * gen.fstar_finite_sup
    return total


def approx_error(gamma: BoundedFunctionClass, gamma_tilde: BoundedFunctionClass, gen: DivergenceGenerator) -> float:
    """(1 + (f*)'_+(z0 + beta - alpha)) * max_h min_h~ ||h - h~||_inf on the common support."""
    if gamma.kind != "finite-dictionary" or gamma_tilde.kind != "finite-dictionary":
        raise TypeError("approx_error needs two finite dictionaries")
    if gamma.support.shape != gamma_tilde.support.shape or not np.array_equal(gamma.support, gamma_tilde.support):
        raise ValueError("dictionaries are tabulated on different supports")
    require_compatible(gen, gamma.alpha, gamma.beta)
    dist = np.abs(gamma.table[:, None, :] - gamma_tilde.table[None, :, :]).max(axis=2)
    gap = float(dist.min(axis=1).max())
    lip = float(f_star_rprime(gen, gen.z0 + gamma.beta - gamma.alpha))
    return (1.0 + lip) * gap
