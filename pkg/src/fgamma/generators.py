"""Convex generator functions f and their Legendre conjugates.

Every divergence in the package is driven by a :class:`DivergenceGenerator`,
which bundles f, f*, the right derivative (f*)'_+, the anchor point
``z0 = f'_+(1)`` and the finiteness domain of f*.  All callables are
vectorised over numpy arrays and represent ``f* = +inf`` with ``np.inf``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

ArrayFn = Callable[[np.ndarray], np.ndarray]

LOG2 = math.log(2.0)


class IncompatibleGeneratorError(ValueError):
    """Raised when [alpha, beta] is too wide for the generator's conjugate."""


@dataclass(frozen=True)
class DivergenceGenerator:
    """A convex f on (domain_lo, domain_hi) with f(1) = 0, plus its conjugate.

    ``f_star_second`` is optional; when present it must be the (right)
    second derivative of f* on the open finiteness domain and is used for
    closed-form Lipschitz constants of (f*)'_+.
    """

    name: str
    f: ArrayFn = field(repr=False)
    f_star_fn: ArrayFn = field(repr=False)
    f_star_rprime_fn: ArrayFn = field(repr=False)
    z0: float
    domain_lo: float = 0.0
    domain_hi: float = math.inf
    fstar_finite_sup: float = math.inf
    f_at_zero: float = math.nan
    alpha_param: Optional[float] = None
    f_star_second: Optional[ArrayFn] = field(default=None, repr=False)
    notes: tuple[str, ...] = ()

    @property
    def spec(self) -> str:
        """String form accepted by :func:`make_generator`."""
        if self.alpha_param is not None:
            return f"alpha:{self.alpha_param:g}"
        return self.name

    def f_star(self, z):
        return f_star(self, z)

    def f_star_rprime(self, z):
        return f_star_rprime(self, z)


# ---------------------------------------------------------------------------
# Built-in families
# ---------------------------------------------------------------------------


def _kl() -> DivergenceGenerator:
    def f(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(t > 0, t * np.log(np.where(t > 0, t, 1.0)), 0.0)

    def fs(z):
        return np.exp(np.asarray(z, dtype=float) - 1.0)

    return DivergenceGenerator(
        name="kl",
        f=f,
        f_star_fn=fs,
        f_star_rprime_fn=fs,
        f_star_second=fs,
        z0=1.0,
        f_at_zero=0.0,
    )


def _js() -> DivergenceGenerator:
    def f(t):
        t = np.asarray(t, dtype=float)
        safe = np.where(t > 0, t, 1.0)
        tlogt = np.where(t > 0, t * np.log(safe), 0.0)
        return tlogt - (t + 1.0) * np.log((1.0 + t) / 2.0)

    def fs(z):
        z = np.asarray(z, dtype=float)
        inside = z < LOG2
        with np.errstate(invalid="ignore", divide="ignore"):
            val = -np.log(2.0 - np.exp(np.where(inside, z, 0.0)))
        return np.where(inside, val, np.inf)

    def fs1(z):
        z = np.asarray(z, dtype=float)
        e = np.exp(np.minimum(z, LOG2))
        with np.errstate(divide="ignore"):
            return e / (2.0 - e)

    def fs2(z):
        z = np.asarray(z, dtype=float)
        e = np.exp(np.minimum(z, LOG2))
        with np.errstate(divide="ignore"):
            return 2.0 * e / (2.0 - e) ** 2

    return DivergenceGenerator(
        name="js",
        f=f,
        f_star_fn=fs,
        f_star_rprime_fn=fs1,
        f_star_second=fs2,
        z0=0.0,
        fstar_finite_sup=LOG2,
        f_at_zero=LOG2,
    )


def _alpha(a: float) -> DivergenceGenerator:
    a = float(a)
    if not a > 1.0:
        raise ValueError(f"alpha-divergence requires alpha > 1, got {a}")
    p = a / (a - 1.0)  # conjugate exponent
    coef = (a - 1.0) ** p / a
    const = 1.0 / (a * (a - 1.0))

    def f(t):
        t = np.asarray(t, dtype=float)
        return (np.power(np.maximum(t, 0.0), a) - 1.0) / (a * (a - 1.0))

    def fs(z):
        z = np.asarray(z, dtype=float)
        return coef * np.power(np.maximum(z, 0.0), p) + const

    def fs1(z):
        # ((a-1) z)^(1/(a-1)) for z > 0, else 0
        z = np.asarray(z, dtype=float)
        return np.power((a - 1.0) * np.maximum(z, 0.0), 1.0 / (a - 1.0))

    def fs2(z):
        z = np.asarray(z, dtype=float)
        e = 1.0 / (a - 1.0) - 1.0
        pos = np.maximum(z, 0.0)
        with np.errstate(divide="ignore"):
            val = (a - 1.0) ** (1.0 / (a - 1.0)) / (a - 1.0) * np.power(pos, e)
        if e > 0:
            return np.where(z > 0, val, 0.0)
        if e == 0:
            return np.where(z > 0, val, 0.0)
        # unbounded as z -> 0+ when alpha > 2
        return np.where(z > 0, val, np.where(z == 0, np.inf, 0.0))

    return DivergenceGenerator(
        name=f"alpha({a:g})",
        f=f,
        f_star_fn=fs,
        f_star_rprime_fn=fs1,
        f_star_second=fs2,
        z0=1.0 / (a - 1.0),
        f_at_zero=-const,
        alpha_param=a,
    )


_SPEC_RE = re.compile(r"^\s*alpha\s*[:(]\s*([-+0-9.eE]+)\s*\)?\s*$")


def make_generator(spec, alpha: Optional[float] = None) -> DivergenceGenerator:
    """Build a generator from ``"kl"``, ``"js"``, ``"alpha:2.0"`` or ``"alpha"`` + ``alpha``."""
    if isinstance(spec, DivergenceGenerator):
        return spec
    s = str(spec).strip().lower()
    if s == "kl":
        return _kl()
    if s == "js":
        return _js()
    if s == "alpha":
        if alpha is None:
            raise ValueError("alpha family needs an alpha parameter")
        return _alpha(alpha)
    m = _SPEC_RE.match(s)
    if m:
        return _alpha(float(m.group(1)))
    raise ValueError(f"unknown generator {spec!r} (expected kl, js or alpha:<a>)")


# ---------------------------------------------------------------------------
# Evaluation helpers
# ---------------------------------------------------------------------------


def f_star(gen: DivergenceGenerator, z):
    """f*(z), with ``+inf`` exactly on ``z >= fstar_finite_sup``."""
    z_arr = np.asarray(z, dtype=float)
    out = np.asarray(gen.f_star_fn(z_arr), dtype=float)
    if math.isfinite(gen.fstar_finite_sup):
        out = np.where(z_arr >= gen.fstar_finite_sup, np.inf, out)
    return out if out.ndim else float(out)


def f_star_rprime(gen: DivergenceGenerator, z):
    """Right derivative of f*; only defined on the open finiteness domain."""
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr >= gen.fstar_finite_sup):
        raise ValueError(
            f"(f*)'+ undefined at z >= {gen.fstar_finite_sup:g} for {gen.name}"
        )
    out = np.asarray(gen.f_star_rprime_fn(z_arr), dtype=float)
    return out if out.ndim else float(out)


def in_open_domain(gen: DivergenceGenerator, z: float) -> bool:
    return z < gen.fstar_finite_sup


def check_compatibility(gen: DivergenceGenerator, alpha: float, beta: float) -> Optional[str]:
    """Return ``None`` if z0 + beta - alpha lies inside {f* < inf}, else a diagnostic."""
    if beta < alpha:
        return f"empty range: beta={beta:g} < alpha={alpha:g}"
    edge = gen.z0 + (beta - alpha)
    if not edge < gen.fstar_finite_sup:
        return (
            f"generator {gen.name}: z0 + (beta - alpha) = {edge:.6g} is not below "
            f"sup{{f* < inf}} = {gen.fstar_finite_sup:.6g}; shrink the range so "
            f"beta - alpha < {gen.fstar_finite_sup - gen.z0:.6g}"
        )
    return None


def require_compatible(gen: DivergenceGenerator, alpha: float, beta: float) -> None:
    msg = check_compatibility(gen, alpha, beta)
    if msg is not None:
        raise IncompatibleGeneratorError(msg)


def rprime_lipschitz(gen: DivergenceGenerator, alpha: float, beta: float) -> Optional[float]:
    """Lipschitz constant of (f*)'_+ on [z0 - (beta - alpha), z0 + beta - alpha].

    Closed form (max of f*'' on the interval) for the built-in families; a
    5%-inflated grid of difference quotients for custom generators.  Returns
    ``None`` when (f*)'_+ is not Lipschitz there (alpha-family with alpha > 2
    and an interval reaching z = 0).
    """
    if beta < alpha:
        raise ValueError("rprime_lipschitz requires alpha <= beta")
    w = beta - alpha
    lo, hi = gen.z0 - w, gen.z0 + w
    if not hi < gen.fstar_finite_sup:
        raise IncompatibleGeneratorError(
            f"interval [{lo:g}, {hi:g}] escapes the finiteness domain of {gen.name}"
        )
    if w == 0:
        return 0.0
    if gen.f_star_second is not None:
        if gen.alpha_param is not None:
            a = gen.alpha_param
            if hi <= 0:
                return 0.0
            if a > 2.0:
                if lo <= 0:
                    return None
                return float(gen.f_star_second(np.asarray(lo)))
            return float(gen.f_star_second(np.asarray(hi)))
        # kl and js have increasing f*''
        return float(gen.f_star_second(np.asarray(hi)))
    return _grid_lipschitz(gen.f_star_rprime_fn, lo, hi)


def _grid_lipschitz(fn: ArrayFn, lo: float, hi: float, points: int = 10_000) -> Optional[float]:
    z = np.linspace(lo, hi, points)
    d = np.asarray(fn(z), dtype=float)
    q = np.abs(np.diff(d)) / np.diff(z)
    if not np.all(np.isfinite(q)):
        return None
    return float(1.05 * q.max())


# ---------------------------------------------------------------------------
# Custom generators
# ---------------------------------------------------------------------------


def legendre_dual(gen: DivergenceGenerator, t: float, z_lo: float = -60.0, z_hi: float = 60.0) -> float:
    """Numerically evaluate sup_z {z t - f*(z)} (the double conjugate at t).

    Golden-section on the concave objective; used only as an oracle.
    """
    hi = min(z_hi, gen.fstar_finite_sup - 1e-13)
    lo = z_lo

    def obj(z):
        return -(z * t - f_star(gen, z))

    a, b = lo, hi
    g = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - g * (b - a)
    d = a + g * (b - a)
    fc, fd = obj(c), obj(d)
    while b - a > 1e-12 * (1.0 + abs(a) + abs(b)):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = obj(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = obj(d)
    return -min(fc, fd, obj(lo), obj(hi))


@dataclass
class ValidationReport:
    passed: bool
    checks: dict[str, bool]
    notes: list[str]


def validate_generator(gen: DivergenceGenerator, probes: int = 200) -> ValidationReport:
    """Probe the conjugate identities every downstream result relies on."""
    checks: dict[str, bool] = {}
    notes: list[str] = []
    checks["f(1)=0"] = abs(float(gen.f(np.asarray(1.0)))) <= 1e-12
    checks["f*(z0)=z0"] = abs(f_star(gen, gen.z0) - gen.z0) <= 1e-9
    checks["z0 interior"] = gen.z0 < gen.fstar_finite_sup
    if checks["z0 interior"]:
        checks["(f*)'+(z0)=1"] = abs(f_star_rprime(gen, gen.z0) - 1.0) <= 1e-9
    hi = min(gen.z0 + 5.0, gen.fstar_finite_sup - 1e-6)
    z = np.linspace(gen.z0 - 5.0, hi, probes)
    fz = f_star(gen, z)
    checks["f*(z)>=z"] = bool(np.all(fz >= z - 1e-12))
    checks["f* non-decreasing"] = bool(np.all(np.diff(fz) >= -1e-12))
    d = f_star_rprime(gen, z)
    checks["(f*)'+ non-decreasing"] = bool(np.all(np.diff(d) >= -1e-12))
    t = np.linspace(0.9, 1.1, 41)
    ft = np.asarray(gen.f(t), dtype=float)
    second = ft[:-2] - 2 * ft[1:-1] + ft[2:]
    strict = bool(np.all(second > 0))
    checks["strictly convex on [0.9, 1.1] (probe)"] = strict
    notes.append("strict convexity near 1 is probed on a grid, not certified")
    return ValidationReport(all(checks.values()), checks, notes)


def custom_generator(
    name: str,
    f: ArrayFn,
    f_star_fn: ArrayFn,
    f_star_rprime_fn: ArrayFn,
    z0: float,
    fstar_finite_sup: float = math.inf,
    domain_lo: float = 0.0,
    domain_hi: float = math.inf,
    f_at_zero: float = math.nan,
) -> DivergenceGenerator:
    """Wrap user-supplied closures, refusing them if the identities fail."""
    if domain_lo < 0:
        raise ValueError("generators with domain_lo < 0 are not supported")
    gen = DivergenceGenerator(
        name=name,
        f=f,
        f_star_fn=f_star_fn,
        f_star_rprime_fn=f_star_rprime_fn,
        z0=float(z0),
        domain_lo=domain_lo,
        domain_hi=domain_hi,
        fstar_finite_sup=fstar_finite_sup,
        f_at_zero=f_at_zero,
    )
    report = validate_generator(gen)
    if not report.passed:
        failed = [k for k, ok in report.checks.items() if not ok]
        raise ValueError(f"custom generator {name!r} fails: {', '.join(failed)}")
    return DivergenceGenerator(
        **{**gen.__dict__, "notes": tuple(report.notes)}
    )


BUILTIN_SPECS = ("kl", "js", "alpha:1.5", "alpha:2", "alpha:3", "alpha:5")
