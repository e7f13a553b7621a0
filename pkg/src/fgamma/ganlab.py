"""Desk-scale (f, Gamma)-GAN training on synthetic targets.

The discriminator ascends the empirical objective with nu always resolved
by the 1-D Lambda_f minimisation; the generator descends the same objective
through the envelope (Danskin) gradient.  ``ordering="forward"`` trains
D(Q_n || P_theta,m), ``"reverse"`` trains D(P_theta,m || Q_n).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Optional, Sequence

import jsonschema
import numpy as np

from . import discriminators as dsc
from ._parallel import ordered_map, task_rng
from .bounds import BoundInputs, bound_at_confidence
from .cgf import envelope_weights, lambda_empirical
from .discriminators import BoundedFunctionClass, GeneratorMap
from .divergence import AscentConfig, Sample, estimate_divergence
from .generators import DivergenceGenerator, make_generator, require_compatible
from .rademacher import dudley_ball_bound, estimate_el2_root, k_quantity

TARGET_KINDS = ("gaussian", "gaussian-mixture", "student-t", "uniform")


# ---------------------------------------------------------------------------
# Synthetic targets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SyntheticTarget:
    kind: str
    params: dict = field(default_factory=dict)
    dim: int = 1

    def __post_init__(self):
        if self.kind not in TARGET_KINDS:
            raise ValueError(f"unknown target kind {self.kind!r}")
        if self.dim not in (1, 2):
            raise ValueError("targets are 1- or 2-dimensional")
        p = self.params
        if self.kind == "gaussian":
            if not np.all(np.asarray(p.get("sigma", 1.0)) > 0):
                raise ValueError("gaussian needs sigma > 0")
        elif self.kind == "gaussian-mixture":
            w = np.asarray(p["weights"], dtype=float)
            if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
                raise ValueError("mixture weights must lie on the simplex")
            if len(p["mus"]) != w.size or len(p["sigmas"]) != w.size:
                raise ValueError("mixture needs one mu and sigma per weight")
            if not np.all(np.asarray(p["sigmas"], dtype=float) > 0):
                raise ValueError("mixture sigmas must be > 0")
        elif self.kind == "student-t":
            if not p.get("dof", 0) > 0 or not p.get("scale", 1.0) > 0:
                raise ValueError("student-t needs dof > 0 and scale > 0")
        else:
            if not p.get("lo", 0.0) < p.get("hi", 1.0):
                raise ValueError("uniform needs lo < hi")

    @property
    def finite_second_moment(self) -> bool:
        if self.kind == "student-t":
            return self.params["dof"] > 2
        return True

    def mean(self) -> float:
        p = self.params
        if self.kind == "gaussian":
            return float(p.get("mu", 0.0))
        if self.kind == "gaussian-mixture":
            return float(np.dot(p["weights"], p["mus"]))
        if self.kind == "student-t":
            return float(p.get("loc", 0.0)) if p["dof"] > 1 else math.nan
        return 0.5 * (p.get("lo", 0.0) + p.get("hi", 1.0))

    def variance(self) -> float:
        p = self.params
        if self.kind == "gaussian":
            return float(p.get("sigma", 1.0)) ** 2
        if self.kind == "gaussian-mixture":
            w = np.asarray(p["weights"], float)
            mu = np.asarray(p["mus"], float)
            s = np.asarray(p["sigmas"], float)
            m = np.dot(w, mu)
            return float(np.dot(w, s**2 + mu**2) - m * m)
        if self.kind == "student-t":
            v = p["dof"]
            return p.get("scale", 1.0) ** 2 * v / (v - 2) if v > 2 else math.inf
        return (p.get("hi", 1.0) - p.get("lo", 0.0)) ** 2 / 12.0

    def to_dict(self) -> dict:
        return {"kind": self.kind, "dim": self.dim, **self.params}

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticTarget":
        d = dict(d)
        kind = d.pop("kind")
        dim = int(d.pop("dim", 1))
        return cls(kind, d, dim)

    @classmethod
    def parse(cls, text: str) -> "SyntheticTarget":
        """``gaussian:mu:sigma``, ``student-t:dof[:scale]``, ``uniform:lo:hi``,
        ``gaussian-mixture:w1,w2:mu1,mu2:s1,s2``."""
        parts = text.split(":")
        kind, args = parts[0], parts[1:]
        try:
            if kind == "gaussian":
                mu, sigma = (float(a) for a in (args + ["0", "1"][len(args):])[:2])
                return cls(kind, {"mu": mu, "sigma": sigma})
            if kind == "student-t":
                dof = float(args[0])
                scale = float(args[1]) if len(args) > 1 else 1.0
                return cls(kind, {"dof": dof, "scale": scale})
            if kind == "uniform":
                return cls(kind, {"lo": float(args[0]), "hi": float(args[1])})
            if kind == "gaussian-mixture":
                w, mu, s = ([float(v) for v in a.split(",")] for a in args[:3])
                return cls(kind, {"weights": w, "mus": mu, "sigmas": s})
        except (IndexError, ValueError) as exc:
            raise ValueError(f"cannot parse target {text!r}: {exc}") from None
        raise ValueError(f"unknown target kind {kind!r}")


def _draw(target: SyntheticTarget, n: int, rng: np.random.Generator) -> np.ndarray:
    p = target.params
    d = target.dim
    if target.kind == "gaussian":
        return p.get("mu", 0.0) + p.get("sigma", 1.0) * rng.standard_normal((n, d))
    if target.kind == "gaussian-mixture":
        comp = rng.choice(len(p["weights"]), size=n, p=np.asarray(p["weights"], float))
        mu = np.asarray(p["mus"], float)[comp][:, None]
        s = np.asarray(p["sigmas"], float)[comp][:, None]
        return mu + s * rng.standard_normal((n, d))
    if target.kind == "student-t":
        return p.get("loc", 0.0) + p.get("scale", 1.0) * rng.standard_t(p["dof"], size=(n, d))
    return rng.uniform(p.get("lo", 0.0), p.get("hi", 1.0), size=(n, d))


def sample_target(target: SyntheticTarget, n: int, seed: int) -> Sample:
    """n i.i.d. draws, fully determined by ``seed``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Sample(_draw(target, n, np.random.default_rng(seed)))


def sample_noise(dim: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """Standard gaussian noise source P_Z."""
    return rng.standard_normal((m, dim))


# ---------------------------------------------------------------------------
# Configuration and trace
# ---------------------------------------------------------------------------


def default_eval_class(disc: BoundedFunctionClass) -> BoundedFunctionClass:
    """A wider class used only for held-out evaluation."""
    if disc.kind == "mlp":
        w = (disc.widths[0], *[2 * h for h in disc.widths[1:-1]], 1)
        if len(w) == 2:
            w = (disc.widths[0], 32, 1)
        return dsc.mlp_class(w, 2.0 * disc.rho, (disc.alpha, disc.beta))
    return dsc.mlp_class((disc.input_dim, 32, 32, 1), max(2.0 * disc.rho, 5.0), (disc.alpha, disc.beta))


@dataclass(frozen=True)
class TrainConfig:
    gen: DivergenceGenerator
    disc: BoundedFunctionClass
    gmap: GeneratorMap
    n: int = 2000
    m: Optional[int] = None
    inner_steps: int = 20
    outer_steps: int = 1
    rounds: int = 200
    seed: int = 0
    ordering: str = "forward"
    disc_lr: float = 0.02
    gen_lr: float = 0.005
    gen_init_scale: float = 0.05
    lr_decay: float = 1.0
    revive_tol: float = 1e-3
    restarts: int = 1
    eval_disc: Optional[BoundedFunctionClass] = None
    eval_factor: int = 10
    eval_steps: int = 5
    eval_every: int = 10
    eval_opt: AscentConfig = AscentConfig(steps=200, restarts=2, lr=0.05, patience=30)

    def __post_init__(self):
        if self.ordering not in ("forward", "reverse"):
            raise ValueError("ordering must be 'forward' or 'reverse'")
        if self.n < 1 or (self.m is not None and self.m < 1):
            raise ValueError("n and m must be >= 1")
        if not 0.0 < self.lr_decay <= 1.0:
            raise ValueError("lr_decay must lie in (0, 1]")
        if min(self.inner_steps, self.outer_steps, self.rounds, self.restarts, self.eval_every) < 1:
            raise ValueError("steps, rounds and restarts must be >= 1")
        if not self.disc.differentiable:
            raise ValueError("GAN training needs a differentiable discriminator class")
        if self.gmap.out_dim != self.disc.input_dim:
            raise ValueError("generator output dim does not match discriminator input dim")
        require_compatible(self.gen, self.disc.alpha, self.disc.beta)

    @property
    def m_eff(self) -> int:
        return self.m if self.m is not None else 10 * self.n

    @property
    def evaluator(self) -> BoundedFunctionClass:
        return self.eval_disc if self.eval_disc is not None else default_eval_class(self.disc)


@dataclass
class TrainTrace:
    objective: list[float]
    heldout: list[float]
    heldout_rounds: list[int]
    theta_norm: list[float]
    nu_star: list[float]
    theta_star: np.ndarray
    eps_opt_proxy: float
    initial_heldout: float
    final_heldout: float
    restart_objectives: list[float]
    ordering: str = "forward"

    @property
    def rounds(self) -> int:
        return len(self.objective)

    def rows(self):
        """Per-round rows; held-out is blank on rounds without an evaluation."""
        ho = dict(zip(self.heldout_rounds, self.heldout))
        for i in range(self.rounds):
            yield (i, self.objective[i], ho.get(i, ""), self.theta_norm[i], self.nu_star[i])

    def summary(self) -> dict:
        return {
            "ordering": self.ordering,
            "rounds": self.rounds,
            "initial_heldout": self.initial_heldout,
            "final_heldout": self.final_heldout,
            "final_objective": self.objective[-1],
            "eps_opt_proxy": self.eps_opt_proxy,
            "eps_opt_proxy_label": "proxy: spread of final objectives across generator restarts",
            "restart_objectives": list(self.restart_objectives),
            "theta_star_norm": float(np.linalg.norm(self.theta_star)),
            "all_finite": bool(
                all(np.all(np.isfinite(v)) for v in (self.objective, self.heldout, self.theta_norm, self.nu_star))
            ),
        }


TRACE_COLUMNS = ("round", "objective", "heldout", "theta_norm", "nu_star")


# ---------------------------------------------------------------------------
# Objective pieces
# ---------------------------------------------------------------------------


def gan_objective(ordering: str, h_real: np.ndarray, h_fake: np.ndarray, gen: DivergenceGenerator):
    """Empirical objective with cotangents w.r.t. the real and fake h-values.

    forward: mean(h_real) - Lambda(h_fake);  reverse: mean(h_fake) - Lambda(h_real).
    Returns (value, nu*, cot_real, cot_fake).
    """
    if ordering == "forward":
        plain, lam_side = h_real, h_fake
    else:
        plain, lam_side = h_fake, h_real
    lam = lambda_empirical(lam_side, gen)
    value = float(plain.mean() - lam.value)
    c_plain = np.full(plain.size, 1.0 / plain.size)
    c_lam = -envelope_weights(lam_side, lam.nu_star, gen)
    if ordering == "forward":
        return value, lam.nu_star, c_plain, c_lam
    return value, lam.nu_star, c_lam, c_plain


class _Adam:
    def __init__(self, k: int, lr: float, beta1: float = 0.5):
        self.m = np.zeros(k)
        self.v = np.zeros(k)
        self.t = 0
        self.lr = lr
        self.b1 = beta1

    def step(self, g: np.ndarray) -> np.ndarray:
        self.t += 1
        self.m = self.b1 * self.m + (1 - self.b1) * g
        self.v = 0.999 * self.v + 0.001 * g * g
        mh = self.m / (1 - self.b1**self.t)
        vh = self.v / (1 - 0.999**self.t)
        return self.lr * mh / (np.sqrt(vh) + 1e-12)


def _disc_step(cfg, cls, psi, x_real, x_fake):
    h_r, vjp_r = dsc.linearize(cls, psi, x_real)
    h_f, vjp_f = dsc.linearize(cls, psi, x_fake)
    val, nu, c_r, c_f = gan_objective(cfg.ordering, h_r, h_f, cfg.gen)
    return val, nu, vjp_r(c_r)[0] + vjp_f(c_f)[0]


def generator_gradient(cfg: TrainConfig, psi, theta, x_real, z):
    """d objective / d theta through Phi_theta with nu held at its minimiser."""
    x_fake = dsc.push(cfg.gmap, theta, z)
    h_r = dsc.evaluate(cfg.disc, psi, x_real)
    h_f, vjp_f = dsc.linearize(cfg.disc, psi, x_fake)
    val, nu, _, c_f = gan_objective(cfg.ordering, h_r, h_f, cfg.gen)
    gx = vjp_f(c_f)[1]
    _, gtheta = dsc.push_vjp(cfg.gmap, theta, z, gx)
    return val, gtheta


def full_objective(cfg: TrainConfig, psi, theta, x_real, z) -> float:
    x_fake = dsc.push(cfg.gmap, theta, z)
    h_r = dsc.evaluate(cfg.disc, psi, x_real)
    h_f = dsc.evaluate(cfg.disc, psi, x_fake)
    return gan_objective(cfg.ordering, h_r, h_f, cfg.gen)[0]


def heldout_divergence(cfg: TrainConfig, theta, x_eval, z_eval, opt: Optional[AscentConfig] = None) -> float:
    """Divergence estimate on fresh samples with the evaluation class."""
    fake = dsc.push(cfg.gmap, theta, z_eval)
    if cfg.ordering == "forward":
        res = estimate_divergence(cfg.gen, cfg.evaluator, x_eval, fake, opt or cfg.eval_opt)
    else:
        res = estimate_divergence(cfg.gen, cfg.evaluator, fake, x_eval, opt or cfg.eval_opt)
    return max(res.value, 0.0)


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------


def _check(val: float, what: str, rnd: int) -> None:
    if not math.isfinite(val):
        raise FloatingPointError(f"non-finite {what} at round {rnd}; aborting training")


def _ascend(cfg, cls, psi, opt, x_real, x_fake, steps):
    for _ in range(steps):
        _, _, g = _disc_step(cfg, cls, psi, x_real, x_fake)
        psi = dsc.project_ball(psi + opt.step(g), cls.rho)
    val, nu, _ = _disc_step(cfg, cls, psi, x_real, x_fake)
    return psi, opt, val, nu


def _ascend_or_revive(cfg, cls, psi, opt, x_real, x_fake, steps, rng, lr):
    """Warm-started ascent; a flat result is re-checked from a fresh small start.

    A saturated tanh discriminator can report ~0 while the samples still
    differ, and its gradients vanish.  The fresh start costs one extra
    ascent only on rounds where the warm objective is below ``cfg.revive_tol``.
    """
    psi, opt, val, nu = _ascend(cfg, cls, psi, opt, x_real, x_fake, steps)
    if val < cfg.revive_tol:
        fresh = dsc.sample_ball(rng, cls.param_dim, cls.rho, 0.1)
        f_psi, f_opt, f_val, f_nu = _ascend(cfg, cls, fresh, _Adam(fresh.size, lr), x_real, x_fake, steps)
        if f_val > val:
            return f_psi, f_opt, f_val, f_nu
    return psi, opt, val, nu


def _train_once(cfg: TrainConfig, target: SyntheticTarget, restart: int, data):
    x_real, z, x_eval, z_eval = data
    rng = task_rng(cfg.seed, 2, restart)
    disc, ev = cfg.disc, cfg.evaluator
    theta = dsc.sample_ball(rng, cfg.gmap.param_dim, cfg.gmap.rho, cfg.gen_init_scale)
    psi = dsc.sample_ball(rng, disc.param_dim, disc.rho, 0.1)
    psi_e = dsc.sample_ball(rng, ev.param_dim, ev.rho, 0.1)
    opt_d = _Adam(psi.size, cfg.disc_lr)
    opt_g = _Adam(theta.size, cfg.gen_lr)
    opt_e = _Adam(psi_e.size, cfg.disc_lr)
    ev_cfg = replace(cfg, disc=ev)

    objective, heldout, h_rounds, tnorm, nus = [], [], [], [], []
    for rnd in range(cfg.rounds):
        # linear decay of both step sizes to lr * lr_decay at the last round
        frac = rnd / max(1, cfg.rounds - 1)
        d_lr = cfg.disc_lr * (1.0 - (1.0 - cfg.lr_decay) * frac)
        opt_d.lr = d_lr
        opt_g.lr = cfg.gen_lr * (1.0 - (1.0 - cfg.lr_decay) * frac)
        x_fake = dsc.push(cfg.gmap, theta, z)
        psi, opt_d, val, nu = _ascend_or_revive(cfg, disc, psi, opt_d, x_real, x_fake, cfg.inner_steps, rng, d_lr)
        _check(val, "objective", rnd)
        for _ in range(cfg.outer_steps):
            _, gtheta = generator_gradient(cfg, psi, theta, x_real, z)
            theta = dsc.project_ball(theta - opt_g.step(gtheta), cfg.gmap.rho)
        objective.append(val)
        nus.append(nu)
        tnorm.append(float(np.linalg.norm(theta)))
        if rnd % cfg.eval_every == 0 or rnd == cfg.rounds - 1:
            # warm-started held-out tracker; the constant member gives exactly 0
            fake_eval = dsc.push(cfg.gmap, theta, z_eval)
            psi_e, opt_e, hv, _ = _ascend_or_revive(
                ev_cfg, ev, psi_e, opt_e, x_eval, fake_eval, cfg.eval_steps, rng, cfg.disc_lr
            )
            _check(hv, "held-out estimate", rnd)
            heldout.append(max(hv, 0.0))
            h_rounds.append(rnd)
    return theta, objective, heldout, h_rounds, tnorm, nus


def prepare_data(cfg: TrainConfig, target: SyntheticTarget):
    """(x_real, z, x_eval, z_eval), all derived from cfg.seed."""
    if target.dim != cfg.disc.input_dim:
        raise ValueError("target dimension does not match the discriminator input")
    x_real = sample_target(target, cfg.n, int(task_rng(cfg.seed, 0).integers(2**63))).points
    z = sample_noise(cfg.gmap.noise_dim, cfg.m_eff, task_rng(cfg.seed, 1))
    ne = cfg.eval_factor * cfg.n
    x_eval = sample_target(target, ne, int(task_rng(cfg.seed, 3).integers(2**63))).points
    z_eval = sample_noise(cfg.gmap.noise_dim, ne, task_rng(cfg.seed, 4))
    return x_real, z, x_eval, z_eval


def train_gan(cfg: TrainConfig, target: SyntheticTarget) -> TrainTrace:
    """Alternating discriminator ascent / generator descent; deterministic given cfg.seed."""
    data = prepare_data(cfg, target)
    x_real, z, x_eval, z_eval = data
    init_theta = dsc.sample_ball(task_rng(cfg.seed, 2, 0), cfg.gmap.param_dim, cfg.gmap.rho, cfg.gen_init_scale)
    initial = heldout_divergence(cfg, init_theta, x_eval, z_eval)
    runs = [_train_once(cfg, target, r, data) for r in range(cfg.restarts)]
    finals = [r[1][-1] for r in runs]
    best = int(np.argmin(finals))
    theta, objective, heldout, h_rounds, tnorm, nus = runs[best]
    final = heldout_divergence(cfg, theta, x_eval, z_eval)
    if not math.isfinite(final):
        raise FloatingPointError("non-finite final held-out estimate")
    spread = float(max(finals) - min(finals)) if cfg.restarts > 1 else 0.0
    return TrainTrace(objective, heldout, h_rounds, tnorm, nus, theta, spread, initial, final, finals, cfg.ordering)


# ---------------------------------------------------------------------------
# Consistency experiment
# ---------------------------------------------------------------------------

SWEEP_COLUMNS = ("n", "m", "mean", "stderr", "dudley_r_q_n", "k_m", "gan_bound_threshold")


def certified_terms(cfg: TrainConfig, target: SyntheticTarget, n: int, m: int, ref_size: int = 100_000):
    """Dudley-certified R_{Gamma~,Q,n} and K_{f,Gamma~oPhi,P_Z,m}.

    E[L^2]^(1/2) is estimated once on fixed reference draws so the columns
    depend on (n, m) only through the closed forms.
    """
    disc, gmap = cfg.disc, cfg.gmap
    yq = sample_target(target, ref_size, 12345)
    el2_q = estimate_el2_root(dsc.lipschitz_profile(disc), yq)
    r_q_n = dudley_ball_bound(disc.param_dim, n, el2_q, disc.rho)
    zref = sample_noise(gmap.noise_dim, ref_size, np.random.default_rng(54321))
    el2_z = estimate_el2_root(dsc.composite_lipschitz_profile(disc, gmap), zref)
    k_joint = disc.param_dim + gmap.param_dim
    r_z_m = dudley_ball_bound(k_joint, m, el2_z, dsc.composite_radius(disc, gmap))
    k_m = k_quantity(cfg.gen, r_z_m, m, disc.alpha, disc.beta)
    return r_q_n, k_m


def consistency_experiment(
    cfg: TrainConfig,
    target: SyntheticTarget,
    ns: Sequence[int],
    reps: int = 3,
    seed: int = 0,
    delta: float = 0.05,
) -> list[dict]:
    """Held-out error mean +- stderr per n (m = 10 n), next to the certified bound terms."""
    if reps < 3:
        raise ValueError("reps must be >= 3")
    tasks = [(i, n, r) for i, n in enumerate(ns) for r in range(reps)]

    def run(task):
        i, n, r = task
        s = int(np.random.SeedSequence([seed, i, r]).generate_state(1)[0])
        c = replace(cfg, n=int(n), m=10 * int(n), seed=s)
        return train_gan(c, target).final_heldout

    finals = ordered_map(run, tasks)
    rows = []
    for i, n in enumerate(ns):
        vals = np.array(finals[i * reps : (i + 1) * reps])
        m = 10 * int(n)
        r_q_n, k_m = certified_terms(cfg, target, int(n), m)
        inp = BoundInputs(
            n=int(n),
            m=m,
            alpha=cfg.disc.alpha,
            beta=cfg.disc.beta,
            generator=cfg.gen,
            r=r_q_n,
            k=k_m,
            provenance={"r": "certified", "k": "certified"},
        )
        rep = bound_at_confidence("forward-gan", inp, delta)
        rows.append(
            {
                "n": int(n),
                "m": m,
                "mean": float(vals.mean()),
                "stderr": float(vals.std(ddof=1) / math.sqrt(reps)),
                "dudley_r_q_n": r_q_n,
                "k_m": k_m,
                "gan_bound_threshold": rep.threshold,
            }
        )
    return rows


def config_schema() -> dict:
    return json.loads(resources.files("fgamma").joinpath("data/gan_config.schema.json").read_text("utf-8"))


def validate_config(d: dict) -> None:
    """Raise ValueError with the first schema violation."""
    try:
        jsonschema.validate(d, config_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValueError(f"invalid GAN config at {where}: {exc.message}") from None


def config_from_dict(d: dict) -> tuple[TrainConfig, SyntheticTarget]:
    """Build (TrainConfig, SyntheticTarget) from a JSON config, validating it first."""
    validate_config(d)
    gen = make_generator(d["generator"])
    dd = d["discriminator"]
    lo, hi = dd.get("range", [0.0, 1.0])
    if dd["kind"] == "mlp":
        disc = dsc.mlp_class(dd["widths"], dd.get("rho", 1.0), (lo, hi))
    else:
        disc = dsc.linear_class(dd["input_dim"], dd.get("feature", "affine"), dd.get("rho", 1.0), (lo, hi))
    gd = d["generator_map"]
    gmap = dsc.generator_map(gd["widths"], gd.get("rho", 10.0))
    ev = None
    if "eval_discriminator" in d:
        e = d["eval_discriminator"]
        elo, ehi = e.get("range", [lo, hi])
        ev = dsc.mlp_class(e["widths"], e.get("rho", 2.0), (elo, ehi))
    t = d.get("train", {})
    keys = ("n", "m", "inner_steps", "outer_steps", "rounds", "ordering", "disc_lr", "gen_lr", "restarts", "eval_steps", "eval_factor", "eval_every", "lr_decay")
    kw = {k: t[k] for k in keys if k in t}
    cfg = TrainConfig(gen=gen, disc=disc, gmap=gmap, seed=int(d.get("seed", 0)), eval_disc=ev, **kw)
    target = SyntheticTarget.from_dict(d["target"])
    return cfg, target
