"""Brute-force oracle suites for every library-level invariant.

Each check reports pass/fail and a margin (bound minus measured, so a
negative margin is a failure).  ``quick`` budgets run in seconds; ``full``
budgets use the Monte Carlo sizes the invariants are stated at.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import discriminators as dsc
from .bounds import SETTINGS, BoundInputs, bound, estimation_bounds
from .cgf import (
    delta_f,
    lambda_discrete,
    lambda_empirical,
    lambda_lipschitz_const,
    lambda_rows,
    log_mean_exp,
    perturbation_extremal_gap,
)
from .divergence import (
    AscentConfig,
    as_sample,
    estimate_divergence,
    estimate_divergence_exact,
    estimate_ipm,
    f_divergence_discrete,
    variational_objective,
)
from .generators import BUILTIN_SPECS, f_star, f_star_rprime, legendre_dual, make_generator
from .rademacher import (
    dudley_ball_bound,
    dudley_certificate,
    dudley_integral_bound,
    empirical_rademacher,
    k_quantity,
    rademacher_constant_interval,
)

SUITES = ("generators", "cgf", "divergence", "rademacher", "bounds")
BUDGETS = ("quick", "full")

# (generator, alpha, beta) triples used by the Lambda checks
CGF_CASES = (("kl", 0.0, 1.0), ("js", 0.0, 0.5), ("alpha:2", 0.0, 1.0), ("alpha:3", -0.5, 0.5))


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    margin: float
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.suite}: {self.name}  margin={self.margin:.3e}  {self.detail}".rstrip()


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    @property
    def n_pass(self) -> int:
        return sum(c.passed for c in self.checks)

    @property
    def n_fail(self) -> int:
        return len(self.checks) - self.n_pass

    def to_dict(self) -> dict:
        return {
            "passed": self.n_pass,
            "failed": self.n_fail,
            "checks": [
                {"suite": c.suite, "name": c.name, "passed": c.passed, "margin": c.margin, "detail": c.detail}
                for c in self.checks
            ],
        }


def _check(suite: str, name: str, margin: float, detail: str = "") -> Check:
    margin = float(margin)
    return Check(suite, name, bool(margin >= 0 and math.isfinite(margin)), margin, detail)


def _size(budget: str, quick: int, full: int) -> int:
    return quick if budget == "quick" else full


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def suite_generators(budget: str, seed: int) -> list[Check]:
    rng = np.random.default_rng([seed, 1])
    out = []
    nz = _size(budget, 1000, 10_000)
    nt = _size(budget, 20, 100)
    for spec in BUILTIN_SPECS:
        g = make_generator(spec)
        err = max(abs(f_star(g, g.z0) - g.z0), abs(f_star_rprime(g, g.z0) - 1.0))
        out.append(_check("generators", f"{spec}: f*(z0)=z0 and (f*)'+(z0)=1", 1e-9 - err))
        hi = min(g.z0 + 5.0, g.fstar_finite_sup - 1e-6)
        z = np.sort(rng.uniform(g.z0 - 5.0, hi, nz))
        fz = f_star(g, z)
        d = f_star_rprime(g, z)
        worst = min((fz - z).min(), np.diff(fz).min(), np.diff(d).min())
        out.append(_check("generators", f"{spec}: f*(z)>=z, f* and (f*)'+ non-decreasing", worst + 1e-12))
        t = np.linspace(0.05, 3.0, nt)
        rt = max(abs(legendre_dual(g, ti) - float(g.f(np.asarray(ti)))) for ti in t)
        out.append(_check("generators", f"{spec}: Legendre round trip", 1e-6 - rt))
    return out


# ---------------------------------------------------------------------------
# cgf
# ---------------------------------------------------------------------------


def wide_grid_lambda(x: np.ndarray, gen, alpha: float, beta: float, points: int = 100_000) -> float:
    """min over a uniform nu-grid on [alpha - z0 - 10, beta - z0 + 10] (infinite values skipped)."""
    nu = np.linspace(alpha - gen.z0 - 10.0, beta - gen.z0 + 10.0, points)
    best = math.inf
    for chunk in np.array_split(nu, max(1, points // 5000)):
        with np.errstate(over="ignore", invalid="ignore"):
            vals = chunk + np.mean(f_star(gen, x[None, :] - chunk[:, None]), axis=1)
        best = min(best, float(np.nanmin(vals)))
    return best


def suite_cgf(budget: str, seed: int) -> list[Check]:
    rng = np.random.default_rng([seed, 2])
    out = []
    kl = make_generator("kl")
    nk = _size(budget, 200, 1000)
    err = 0.0
    for _ in range(nk):
        x = rng.uniform(0, 1, rng.integers(1, 65))
        err = max(err, abs(lambda_empirical(x, kl).value - log_mean_exp(x)))
    out.append(_check("cgf", "kl closed form (log-mean-exp)", 1e-9 - err, f"{nk} vectors"))

    n_inst = _size(budget, 10, 100)
    n_pairs = _size(budget, 1000, 10_000)
    for spec, a, b in CGF_CASES:
        g = make_generator(spec)
        w = b - a
        # compact bracket vs wide grid
        gap = 0.0
        for _ in range(n_inst):
            x = rng.uniform(a, b, rng.integers(1, 33))
            gap = max(gap, abs(lambda_empirical(x, g).value - wide_grid_lambda(x, g, a, b)))
        out.append(_check("cgf", f"{spec}: compact-bracket vs wide-grid", 1e-6 - gap, f"{n_inst} instances"))

        # shift equivariance and monotonicity
        sh, mono = 0.0, 0.0
        for _ in range(n_inst):
            x = rng.uniform(a, b, rng.integers(1, 33))
            c = rng.uniform(-3, 3)
            sh = max(sh, abs(lambda_empirical(x + c, g).value - lambda_empirical(x, g).value - c))
            xt = np.minimum(x + rng.uniform(0, w, x.size) * (rng.random(x.size) < 0.5), b)
            mono = max(mono, lambda_empirical(x, g).value - lambda_empirical(xt, g).value)
        out.append(_check("cgf", f"{spec}: shift equivariance", 1e-9 - sh))
        out.append(_check("cgf", f"{spec}: monotonicity", 1e-9 - mono))

        # Lipschitz bound on random pairs
        L = lambda_lipschitz_const(g, a, b)
        n = 8
        X = rng.uniform(a, b, (n_pairs, n))
        Xt = rng.uniform(a, b, (n_pairs, n))
        lx, *_ = lambda_rows(X, g)
        lxt, *_ = lambda_rows(Xt, g)
        excess = np.abs(lxt - lx) - L * np.mean(np.abs(Xt - X), axis=1)
        viol = int(np.sum(excess > 1e-9))
        out.append(_check("cgf", f"{spec}: Lipschitz bound", -float(viol) if viol else 1e-9 - excess.max(), f"{viol} violations / {n_pairs}"))

        # perturbation extremal equality and random perturbations
        worst_eq, worst_rand = 0.0, -math.inf
        for n in (1, 2, 4, 10, 100):
            d = delta_f(g, n, a, b)
            worst_eq = max(worst_eq, abs(perturbation_extremal_gap(g, n, a, b) - d / n))
            m = _size(budget, 100, 500)
            X = rng.uniform(a, b, (m, n))
            Xt = X.copy()
            Xt[np.arange(m), rng.integers(0, n, m)] = rng.uniform(a, b, m)
            l0, *_ = lambda_rows(X, g, tol=1e-13)
            l1, *_ = lambda_rows(Xt, g, tol=1e-13)
            worst_rand = max(worst_rand, float(np.max(np.abs(l1 - l0)) - d / n))
        out.append(_check("cgf", f"{spec}: perturbation extremal equality", 1e-6 - worst_eq, "n in 1,2,4,10,100"))
        out.append(_check("cgf", f"{spec}: random perturbations <= Delta/n", 1e-9 - worst_rand))

        # sandwich
        upper = float(f_star(g, w + g.z0)) - g.z0
        loosest = float(f_star_rprime(g, w + g.z0)) * w
        ds = np.array([delta_f(g, n, a, b) for n in range(1, 101)])
        m = min((ds - w).min(), (upper - ds).min(), loosest - upper)
        out.append(_check("cgf", f"{spec}: Delta sandwich n=1..100", m + 1e-12))
    out.append(_check("cgf", "kl: Delta_{f,1} = beta - alpha", 1e-9 - abs(delta_f(kl, 1, 0.0, 1.0) - 1.0)))
    return out


# ---------------------------------------------------------------------------
# divergence
# ---------------------------------------------------------------------------


def random_dictionary(rng, atoms: int, members: int, alpha=0.0, beta=1.0):
    """Random tabulated dictionary on atoms 0..atoms-1; member 0 is constant."""
    table = rng.uniform(alpha, beta, (members, atoms))
    table[0] = rng.uniform(alpha, beta)
    return dsc.dictionary_class(np.arange(atoms, dtype=float), table, (alpha, beta))


def weighted_sample(probs: np.ndarray, size: int) -> np.ndarray:
    """A sample on atoms 0..k-1 whose empirical measure is ``probs`` (probs*size integral)."""
    counts = np.rint(np.asarray(probs) * size).astype(int)
    return np.repeat(np.arange(len(probs), dtype=float), counts)


def suite_divergence(budget: str, seed: int) -> list[Check]:
    rng = np.random.default_rng([seed, 3])
    out = []
    kl = make_generator("kl")
    # two-atom KL example with a rich tabulated dictionary
    grid = np.linspace(0.0, 1.2, 121)
    table = np.array(np.meshgrid(grid, grid, indexing="ij")).reshape(2, -1).T
    cls = dsc.dictionary_class(np.array([0.0, 1.0]), table, (0.0, 1.2))
    q = weighted_sample(np.array([0.75, 0.25]), 4)
    p = weighted_sample(np.array([0.5, 0.5]), 2)
    v = estimate_divergence_exact(kl, cls, q, p)
    ref = f_divergence_discrete(kl, [0.75, 0.25], [0.5, 0.5])
    out.append(_check("divergence", "two-atom kl example", 1e-3 - abs(v - 0.130812), f"value={v:.7f} direct={ref:.7f}"))

    n_pairs = _size(budget, 20, 100)
    worst_f, worst_ipm, worst_self = -math.inf, -math.inf, 0.0
    for i in range(n_pairs):
        spec = ("kl", "alpha:2", "js")[i % 3]
        g = make_generator(spec)
        beta = 0.5 if spec == "js" else 1.0
        k = int(rng.integers(2, 6))
        cls = random_dictionary(rng, k, 8, 0.0, beta)
        qp = rng.dirichlet(np.ones(k))
        pp = rng.dirichlet(np.ones(k))
        q = weighted_sample(_fix(qp, 40), 40)
        p = weighted_sample(_fix(pp, 40), 40)
        qe = np.bincount(q.astype(int), minlength=k) / q.size
        pe = np.bincount(p.astype(int), minlength=k) / p.size
        d = estimate_divergence_exact(g, cls, q, p)
        worst_f = max(worst_f, d - f_divergence_discrete(g, qe, pe))
        worst_ipm = max(worst_ipm, d - estimate_ipm(cls, q, p))
        worst_self = max(worst_self, abs(estimate_divergence_exact(g, cls, q, q)))
    out.append(_check("divergence", "exact <= discrete f-divergence", 1e-9 - worst_f, f"{n_pairs} pairs"))
    out.append(_check("divergence", "exact <= IPM", 1e-9 - worst_ipm, f"{n_pairs} pairs"))
    out.append(_check("divergence", "D(mu||mu) = 0 with a constant member", -worst_self))

    # non-negativity and recomputation for a parameterised class
    mlp = dsc.mlp_class((1, 4, 1), 2.0, (0.0, 1.0))
    reps = _size(budget, 2, 6)
    worst_neg, worst_re = math.inf, 0.0
    for r in range(reps):
        qs = as_sample(rng.normal(0.0, 1.0, 50))
        ps = as_sample(rng.normal(rng.uniform(-1, 1), 1.0, 50))
        res = estimate_divergence(kl, mlp, qs, ps, AscentConfig(steps=60, restarts=2, seed=r))
        worst_neg = min(worst_neg, res.value)
        again, _ = variational_objective(kl, mlp, res.theta_star, qs, ps)
        worst_re = max(worst_re, abs(again - res.value))
    out.append(_check("divergence", "non-negativity (mlp with constant member)", worst_neg + 1e-9))
    out.append(_check("divergence", "EstimateResult recomputation", 1e-9 - worst_re))
    return out


def _fix(probs: np.ndarray, total: int) -> np.ndarray:
    """Round a probability vector to multiples of 1/total that still sum to one."""
    c = np.floor(probs * total).astype(int)
    rem = total - c.sum()
    order = np.argsort(-(probs * total - c))
    c[order[:rem]] += 1
    return c / total


# ---------------------------------------------------------------------------
# rademacher
# ---------------------------------------------------------------------------


def suite_rademacher(budget: str, seed: int) -> list[Check]:
    rng = np.random.default_rng([seed, 4])
    out = []
    for n, want in ((1, 0.5), (2, 0.25)):
        cf = rademacher_constant_interval(n, 0.0, 1.0)
        levels = np.linspace(0.0, 1.0, 2)
        cls = dsc.constant_dictionary(np.arange(n, dtype=float), levels)
        en = empirical_rademacher(cls, np.arange(n, dtype=float), exact=True).mean
        out.append(_check("rademacher", f"constant interval n={n}", 1e-12 - max(abs(cf - want), abs(en - want))))

    cases = _size(budget, 3, 10)
    worst = math.inf
    for i in range(cases):
        n = int(rng.integers(2, 9))
        cls = random_dictionary(rng, n, 6)
        y = np.arange(n, dtype=float)
        ex = empirical_rademacher(cls, y, exact=True).mean
        mc = empirical_rademacher(cls, y, draws=_size(budget, 2000, 20_000), seed=seed + i)
        worst = min(worst, 3.0 * mc.stderr - abs(mc.mean - ex))
    out.append(_check("rademacher", "dictionary MC within 3 stderr of enumeration", worst, f"{cases} cases"))

    m = min(12.0 / math.sqrt(1) * (4.0 * math.sqrt(k)) - dudley_integral_bound(k, 1, 1.0, 2.0, 1.0) for k in range(1, 17))
    out.append(_check("rademacher", "entropy integral <= 4 sqrt(k) closed bound, k=1..16", m))
    out.append(_check("rademacher", "ball bound 9.6 at (k=4, n=100, el2=1)", 1e-12 - abs(dudley_ball_bound(4, 100, 1.0) - 9.6)))

    matrix = [
        dsc.linear_class(1, "affine", 1.0),
        dsc.linear_class(2, "identity", 2.0),
        dsc.mlp_class((1, 3, 1), 1.0),
        dsc.mlp_class((2, 4, 1), 2.0),
        dsc.mlp_class((1, 4, 4, 1), 1.5),
    ]
    draws = _size(budget, 20, 100)
    opt = AscentConfig(steps=_size(budget, 60, 150), restarts=3, lr=0.05, patience=30)
    worst = math.inf
    for j, cls in enumerate(matrix):
        y = rng.normal(size=(30, cls.input_dim))
        est = empirical_rademacher(cls, y, draws=draws, seed=seed + j, opt=opt)
        cert = dudley_certificate(cls, y)["ball_bound"]
        worst = min(worst, cert + 3.0 * est.stderr - est.mean)
    out.append(_check("rademacher", "MC estimate <= Dudley certificate + 3 stderr", worst, "5-case matrix"))

    g = make_generator("kl")
    rs = np.linspace(0, 1, 11)
    ks = [k_quantity(g, r, 50, 0.0, 1.0) for r in rs]
    kw = [k_quantity(g, 0.1, 50, 0.0, b) for b in np.linspace(0.1, 1.5, 15)]
    out.append(_check("rademacher", "k_quantity non-decreasing in r and width", min(np.diff(ks).min(), np.diff(kw).min()) + 1e-15))
    return out


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

TAIL_P = np.array([0.1, 0.2, 0.3, 0.4])


def tail_dictionary(alpha: float = 0.0, beta: float = 1.0):
    """Fixed 8-member dictionary on a 4-atom space; member 0 is constant."""
    rng = np.random.default_rng(2024)
    table = rng.uniform(alpha, beta, (8, 4))
    table[0] = 0.5 * (alpha + beta)
    table[1] = [alpha, beta, alpha, beta]
    return dsc.dictionary_class(np.arange(4, dtype=float), table, (alpha, beta))


def population_rademacher(cls, probs: np.ndarray, n: int, reps: int, seed: int) -> tuple[float, float]:
    """MC estimate (mean, stderr) of R_{Gamma,P,n} for a dictionary on atoms."""
    rng = np.random.default_rng([seed, 77, n])
    vals = np.empty(reps)
    for i in range(reps):
        y = rng.choice(probs.size, size=n, p=probs)
        s = rng.choice((-1.0, 1.0), size=n)
        vals[i] = (cls.table[:, y] @ s).max() / n
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(reps))


def _lambda_counts(table: np.ndarray, counts: np.ndarray, gen) -> np.ndarray:
    """Lambda over the empirical measure with the given atom counts, for each member."""
    keep = counts > 0
    val, *_ = lambda_rows(table[:, keep], gen, weights=counts[keep] / counts.sum())
    return val


def ulln_experiment(gen, n: int, reps: int, seed: int, alpha=0.0, beta=1.0) -> dict:
    """MC of E sup_h (Lambda^P - Lambda^{P_n}) and E sup_h (Lambda^{P_n} - Lambda^P)."""
    cls = tail_dictionary(alpha, beta)
    lam_p = np.array([lambda_discrete(row, TAIL_P, gen) for row in cls.table])
    rng = np.random.default_rng([seed, 8, n])
    plus = np.empty(reps)
    minus = np.empty(reps)
    for i in range(reps):
        counts = rng.multinomial(n, TAIL_P)
        lam_n = _lambda_counts(cls.table, counts, gen)
        plus[i] = (lam_p - lam_n).max()
        minus[i] = (lam_n - lam_p).max()
    r, _ = population_rademacher(cls, TAIL_P, n, reps, seed)
    bound = 2.0 * k_quantity(gen, r, n, alpha, beta)
    se = lambda v: float(v.std(ddof=1) / math.sqrt(reps))
    return {
        "n": n,
        "plus": float(plus.mean()),
        "plus_se": se(plus),
        "minus": float(minus.mean()),
        "minus_se": se(minus),
        "r": r,
        "bound": bound,
    }


def tail_experiment(gen, n: int, m: int, reps: int, eps_list, seed: int, alpha=0.0, beta=1.0) -> list[dict]:
    """Q = P estimation experiment on a 4-atom space with an exact dictionary sup.

    For each epsilon reports the frequency of the estimator exceeding the
    upper threshold of the estimation bound, of falling short by epsilon, and of deviating
    from its own mean by epsilon, next to the bound's tail.
    """
    cls = tail_dictionary(alpha, beta)
    rng = np.random.default_rng([seed, 10])
    est = np.empty(reps)
    for i in range(reps):
        cq = rng.multinomial(n, TAIL_P)
        cp = rng.multinomial(m, TAIL_P)
        means = cls.table @ (cq / n)
        est[i] = (means - _lambda_counts(cls.table, cp, gen)).max()
    r_q, _ = population_rademacher(cls, TAIL_P, n, 4000, seed)
    r_p, _ = population_rademacher(cls, TAIL_P, m, 4000, seed + 1)
    k_p = k_quantity(gen, r_p, m, alpha, beta)
    true_d = 0.0  # Q = P and the dictionary contains a constant
    rows = []
    for eps in eps_list:
        inp = BoundInputs(n=n, m=m, alpha=alpha, beta=beta, epsilon=eps, generator=gen, r=r_q, k=k_p)
        lower, upper = estimation_bounds(inp)
        tail = upper.tail_probability
        freqs = {
            "upper": float(np.mean(est - true_d >= upper.threshold)),
            "lower": float(np.mean(true_d - est >= eps)),
            "centered": float(np.mean(est - est.mean() >= eps)),
        }
        se = math.sqrt(max(tail * (1 - tail), 0.0) / reps)
        rows.append({"epsilon": eps, "tail": tail, "binomial_se": se, "threshold": upper.threshold, **freqs})
    return rows


def suite_bounds(budget: str, seed: int) -> list[Check]:
    out = []
    kl = make_generator("kl")
    base = BoundInputs(n=100, m=100, alpha=0.0, beta=1.0, epsilon=0.2, generator=kl, r=0.05, k=0.05)
    worst = math.inf
    for s in SETTINGS:
        tails_e = [bound(s, replace(base, epsilon=e)).tail_probability for e in np.linspace(0.01, 1, 20)]
        tails_n = [bound(s, replace(base, n=n)).tail_probability for n in (10, 20, 50, 100, 400)]
        tails_m = [bound(s, replace(base, m=m)).tail_probability for m in (10, 20, 50, 100, 400)]
        worst = min(worst, -np.diff(tails_e).max(), -np.diff(tails_n).max(), -np.diff(tails_m).max())
        t0 = bound(s, base).threshold
        for key in ("eps_approx", "eps_opt", "r", "k", "epsilon"):
            worst = min(worst, bound(s, replace(base, **{key: getattr(base, key) + 0.1})).threshold - t0)
    out.append(_check("bounds", "tails monotone, thresholds monotone", worst + 1e-15))

    g = make_generator("alpha:2")
    w = 1e-4
    lim = abs(delta_f(g, 50, 0.0, w) - w) / w
    out.append(_check("bounds", "Delta -> beta - alpha as the range shrinks", 1e-3 - lim))

    reps = _size(budget, 500, 5000)
    worst = math.inf
    for row in tail_experiment(kl, 20, 20, reps, (0.05, 0.1, 0.2), seed):
        lim = row["tail"] + 3.0 * row["binomial_se"]
        worst = min(worst, lim - row["upper"], lim - row["lower"], lim - row["centered"])
    out.append(_check("bounds", "empirical tail validity (Q = P, 4 atoms)", worst, f"{reps} reps"))

    reps = _size(budget, 300, 2000)
    worst = math.inf
    for n in (10, 100):
        e = ulln_experiment(kl, n, reps, seed)
        worst = min(worst, e["bound"] - e["plus"] - 3 * e["plus_se"], e["bound"] - e["minus"] - 3 * e["minus_se"])
    out.append(_check("bounds", "ULLN: E sup |Lambda^P - Lambda^{P_n}| <= 2K", worst, f"{reps} reps"))
    return out


_RUNNERS: dict[str, Callable[[str, int], list[Check]]] = {
    "generators": suite_generators,
    "cgf": suite_cgf,
    "divergence": suite_divergence,
    "rademacher": suite_rademacher,
    "bounds": suite_bounds,
}


def run_suite(suite: str = "all", budget: str = "quick", seed: int = 0) -> Report:
    if budget not in BUDGETS:
        raise ValueError(f"unknown budget {budget!r}; choose quick or full")
    if suite == "all":
        names = SUITES
    elif suite in _RUNNERS:
        names = (suite,)
    else:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    rep = Report()
    for name in names:
        rep.checks.extend(_RUNNERS[name](budget, seed))
    return rep
