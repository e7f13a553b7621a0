"""Bounded discriminator classes and generator maps.

Parameterised classes live on a Euclidean parameter ball of radius ``rho``.
Their outputs are pushed through a smooth squash onto ``[range_lo, range_hi]``
so range bounds hold by construction.  Finite dictionaries are tabulated on
explicit support points and exist to give exact enumeration oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

_BALL_SLACK = 1e-9


# ---------------------------------------------------------------------------
# Plain MLP with reverse-mode gradients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MLP:
    """Fully connected net, tanh hidden layers, affine output layer.

    ``widths = (d_in, h_1, ..., d_out)``; two widths give a plain affine map.
    Parameters are packed layer by layer as ``W.ravel()`` then ``b``.
    """

    widths: tuple[int, ...]

    def __post_init__(self):
        if len(self.widths) < 2 or any(int(w) < 1 for w in self.widths):
            raise ValueError(f"bad layer widths {self.widths}")

    @property
    def n_layers(self) -> int:
        return len(self.widths) - 1

    @property
    def n_params(self) -> int:
        return sum(o * i + o for i, o in zip(self.widths[:-1], self.widths[1:]))

    def unpack(self, theta: np.ndarray):
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got shape {theta.shape}")
        layers = []
        k = 0
        for i, o in zip(self.widths[:-1], self.widths[1:]):
            W = theta[k : k + o * i].reshape(o, i)
            k += o * i
            b = theta[k : k + o]
            k += o
            layers.append((W, b))
        return layers

    def forward(self, theta, x):
        layers = self.unpack(theta)
        a = np.asarray(x, dtype=float)
        acts = [a]
        for li, (W, b) in enumerate(layers):
            z = a @ W.T + b
            a = np.tanh(z) if li < len(layers) - 1 else z
            acts.append(a)
        return a, (layers, acts)

    def backward(self, cache, g_out):
        """Return (d theta, d x) for the scalar sum(g_out * out)."""
        layers, acts = cache
        g = np.asarray(g_out, dtype=float)
        grads = []
        for li in range(len(layers) - 1, -1, -1):
            W, _ = layers[li]
            if li < len(layers) - 1:
                g = g * (1.0 - acts[li + 1] ** 2)
            grads.append((g.T @ acts[li], g.sum(axis=0)))
            g = g @ W
        grads.reverse()
        flat = np.concatenate([np.concatenate([gW.ravel(), gb]) for gW, gb in grads])
        return flat, g


# ---------------------------------------------------------------------------
# Ball geometry
# ---------------------------------------------------------------------------


def project_ball(theta: np.ndarray, rho: float) -> np.ndarray:
    """Rescale onto the sphere of radius rho when outside the ball."""
    nrm = float(np.linalg.norm(theta))
    if nrm > rho:
        return theta * (rho / nrm) if nrm > 0 else theta
    return theta


def sample_ball(rng: np.random.Generator, k: int, rho: float, scale: float = 1.0) -> np.ndarray:
    """Uniform draw from the ball of radius ``scale * rho`` in R^k."""
    if k == 0:
        return np.zeros(0)
    v = rng.standard_normal(k)
    v /= max(np.linalg.norm(v), 1e-300)
    r = scale * rho * rng.random() ** (1.0 / k)
    return v * r


def _check_ball(theta: np.ndarray, rho: float) -> None:
    if np.linalg.norm(theta) > rho * (1.0 + _BALL_SLACK) + _BALL_SLACK:
        raise ValueError(
            f"parameter norm {np.linalg.norm(theta):.6g} exceeds ball radius {rho:.6g}"
        )


def _max_product(total: float, count: int) -> float:
    """max prod x_j subject to sum x_j^2 <= total^2 over ``count`` factors."""
    if count == 0:
        return 1.0
    return (total * total / count) ** (count / 2.0)


def _mlp_param_jacobian_bound(widths: Sequence[int], rho: float):
    """(a, b) with ||d out / d theta||_op <= a + b ||x|| over the ball.

    Chain rule with tanh slopes <= 1, ||a_l|| <= sqrt(width_l) for hidden
    activations and operator norms bounded through ||W||_F <= rho.
    """
    L = len(widths) - 1
    c = [_max_product(rho, L - l) for l in range(1, L + 1)]  # c[l-1] bounds prod_{j>l} ||W_j||
    head = c[0] ** 2
    for l in range(2, L + 1):
        head += c[l - 1] ** 2 * (widths[l - 1] + 1)
    return math.sqrt(head), c[0]


# ---------------------------------------------------------------------------
# Function classes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LipschitzProfile:
    """Parameter-Lipschitz bound ``L(y) = a + b ||y||`` (or a custom callable)."""

    a: float
    b: float
    fn: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)

    def __call__(self, points) -> np.ndarray:
        y = np.atleast_2d(np.asarray(points, dtype=float))
        if self.fn is not None:
            return np.asarray(self.fn(y), dtype=float)
        return self.a + self.b * np.linalg.norm(y, axis=1)


@dataclass(frozen=True)
class BoundedFunctionClass:
    kind: str  # "mlp" | "linear-features" | "finite-dictionary"
    range_lo: float
    range_hi: float
    input_dim: int
    rho: float = 0.0
    widths: tuple[int, ...] = ()
    feature: str = ""
    support: Optional[np.ndarray] = field(default=None, repr=False)
    table: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def alpha(self) -> float:
        return self.range_lo

    @property
    def beta(self) -> float:
        return self.range_hi

    @property
    def param_dim(self) -> int:
        if self.kind == "mlp":
            return MLP(self.widths).n_params
        if self.kind == "linear-features":
            return self.input_dim + (1 if self.feature == "affine" else 0)
        return 0

    @property
    def size(self) -> int:
        """Number of dictionary members (0 for parameterised classes)."""
        return 0 if self.table is None else self.table.shape[0]

    @property
    def differentiable(self) -> bool:
        return self.kind != "finite-dictionary"

    def squash(self, s):
        return np.clip(
            self.range_lo + (self.range_hi - self.range_lo) * 0.5 * (np.tanh(s) + 1.0),
            self.range_lo,
            self.range_hi,
        )

    def squash_slope(self) -> float:
        return 0.5 * (self.range_hi - self.range_lo)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "range": [self.range_lo, self.range_hi], "rho": self.rho}
        if self.kind == "mlp":
            d["widths"] = list(self.widths)
        elif self.kind == "linear-features":
            d["feature"] = self.feature
            d["input_dim"] = self.input_dim
        else:
            d["size"] = self.size
        return d


def mlp_class(widths: Sequence[int], rho: float = 1.0, range=(0.0, 1.0)) -> BoundedFunctionClass:
    widths = tuple(int(w) for w in widths)
    if widths[-1] != 1:
        raise ValueError("discriminator mlp must have scalar output")
    lo, hi = float(range[0]), float(range[1])
    if not lo <= hi:
        raise ValueError("range must satisfy lo <= hi")
    MLP(widths)
    return BoundedFunctionClass("mlp", lo, hi, widths[0], rho=float(rho), widths=widths)


def linear_class(input_dim: int, feature: str = "affine", rho: float = 1.0, range=(0.0, 1.0)) -> BoundedFunctionClass:
    if feature not in ("identity", "affine"):
        raise ValueError(f"unknown feature map {feature!r}")
    lo, hi = float(range[0]), float(range[1])
    return BoundedFunctionClass("linear-features", lo, hi, int(input_dim), rho=float(rho), feature=feature)


def dictionary_class(support, table, range=None) -> BoundedFunctionClass:
    """Finite dictionary: ``table[j, s]`` is member j evaluated at support point s."""
    sup = np.asarray(support, dtype=float)
    if sup.ndim == 1:
        sup = sup[:, None]
    tab = np.atleast_2d(np.asarray(table, dtype=float))
    if tab.shape[1] != sup.shape[0]:
        raise ValueError("table columns must match support points")
    if len({tuple(r) for r in sup}) != sup.shape[0]:
        raise ValueError("support points must be distinct")
    lo, hi = (float(tab.min()), float(tab.max())) if range is None else (float(range[0]), float(range[1]))
    if tab.min() < lo or tab.max() > hi:
        raise ValueError("dictionary values leave the declared range")
    if not np.any(np.ptp(tab, axis=1) == 0):
        raise ValueError("finite dictionaries must contain a constant member")
    tab.setflags(write=False)
    sup.setflags(write=False)
    return BoundedFunctionClass("finite-dictionary", lo, hi, sup.shape[1], support=sup, table=tab)


def constant_dictionary(support, levels) -> BoundedFunctionClass:
    """Dictionary of constant functions at the given levels."""
    sup = np.asarray(support, dtype=float)
    n = sup.shape[0]
    lv = np.asarray(levels, dtype=float)
    return dictionary_class(sup, np.repeat(lv[:, None], n, axis=1))


def support_index(cls: BoundedFunctionClass, points) -> np.ndarray:
    """Map points onto dictionary support indices; off-support points are an error."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[1] != cls.input_dim:
        raise ValueError(f"points have dim {pts.shape[1]}, class expects {cls.input_dim}")
    lookup = {tuple(r): i for i, r in enumerate(cls.support)}
    try:
        return np.fromiter((lookup[tuple(r)] for r in pts), dtype=np.intp, count=pts.shape[0])
    except KeyError as exc:
        raise ValueError(f"point {exc.args[0]} is not on the dictionary support") from None


def _as_points(cls: BoundedFunctionClass, points) -> np.ndarray:
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None] if cls.input_dim == 1 else x[None, :]
    if x.shape[1] != cls.input_dim:
        raise ValueError(f"points have dim {x.shape[1]}, class expects {cls.input_dim}")
    return x


def _features(cls: BoundedFunctionClass, x: np.ndarray) -> np.ndarray:
    if cls.feature == "affine":
        return np.hstack([x, np.ones((x.shape[0], 1))])
    return x


def _pre_activation(cls, theta, x):
    theta = np.asarray(theta, dtype=float)
    _check_ball(theta, cls.rho)
    if cls.kind == "mlp":
        net = MLP(cls.widths)
        out, cache = net.forward(theta, x)
        return out[:, 0], ("mlp", net, cache)
    phi = _features(cls, x)
    if theta.shape != (phi.shape[1],):
        raise ValueError(f"expected {phi.shape[1]} parameters, got shape {theta.shape}")
    return phi @ theta, ("lin", phi, None)


def evaluate(cls: BoundedFunctionClass, theta, points) -> np.ndarray:
    """h_theta at each point; dictionaries take an integer member index as theta."""
    if cls.kind == "finite-dictionary":
        j = int(theta)
        if not 0 <= j < cls.size:
            raise ValueError(f"dictionary index {j} out of range")
        return cls.table[j, support_index(cls, points)].copy()
    x = _as_points(cls, points)
    s, _ = _pre_activation(cls, theta, x)
    return cls.squash(s)


def evaluate_all(cls: BoundedFunctionClass, points) -> np.ndarray:
    """(members, points) table of a dictionary class on the given points."""
    if cls.kind != "finite-dictionary":
        raise ValueError("evaluate_all is only defined for finite dictionaries")
    return cls.table[:, support_index(cls, points)]


def _value_and_grads(cls, theta, x, cotangent):
    s, (tag, a, cache) = _pre_activation(cls, theta, x)
    t = np.tanh(s)
    h = np.clip(cls.range_lo + cls.squash_slope() * (t + 1.0), cls.range_lo, cls.range_hi)
    gs = np.asarray(cotangent, dtype=float) * cls.squash_slope() * (1.0 - t * t)
    if tag == "mlp":
        dtheta, dx = a.backward(cache, gs[:, None])
    else:
        dtheta = a.T @ gs
        w = np.asarray(theta, dtype=float)[: cls.input_dim]
        dx = gs[:, None] * w[None, :]
    return h, dtheta, dx


def linearize(cls: BoundedFunctionClass, theta, points):
    """(h, vjp) from one forward pass; ``vjp(cot)`` returns (d theta, d x)."""
    if not cls.differentiable:
        raise TypeError("finite dictionaries are enumerated, not differentiated")
    x = _as_points(cls, points)
    s, (tag, a, cache) = _pre_activation(cls, theta, x)
    t = np.tanh(s)
    h = np.clip(cls.range_lo + cls.squash_slope() * (t + 1.0), cls.range_lo, cls.range_hi)
    dsq = cls.squash_slope() * (1.0 - t * t)
    w = np.asarray(theta, dtype=float)[: cls.input_dim]

    def vjp(cotangent):
        gs = np.asarray(cotangent, dtype=float) * dsq
        if tag == "mlp":
            return a.backward(cache, gs[:, None])
        return a.T @ gs, gs[:, None] * w[None, :]

    return h, vjp


def gradient(cls: BoundedFunctionClass, theta, points, cotangent) -> np.ndarray:
    """sum_i cotangent_i * d h_theta(x_i) / d theta, by reverse mode."""
    if not cls.differentiable:
        raise TypeError("finite dictionaries are enumerated, not differentiated")
    x = _as_points(cls, points)
    _, dtheta, _ = _value_and_grads(cls, theta, x, cotangent)
    return dtheta


def value_and_gradient(cls: BoundedFunctionClass, theta, points, cotangent):
    if not cls.differentiable:
        raise TypeError("finite dictionaries are enumerated, not differentiated")
    x = _as_points(cls, points)
    h, dtheta, _ = _value_and_grads(cls, theta, x, cotangent)
    return h, dtheta


def input_gradient(cls: BoundedFunctionClass, theta, points, cotangent) -> np.ndarray:
    """Rows cotangent_i * d h_theta(x_i) / d x_i."""
    if not cls.differentiable:
        raise TypeError("finite dictionaries are enumerated, not differentiated")
    x = _as_points(cls, points)
    _, _, dx = _value_and_grads(cls, theta, x, cotangent)
    return dx


def lipschitz_profile(cls: BoundedFunctionClass) -> LipschitzProfile:
    """Certified L(y) = a + b ||y|| for theta -> h_theta(y) on the parameter ball."""
    if cls.kind == "finite-dictionary":
        raise TypeError("finite dictionaries carry no parameter metric")
    slope = cls.squash_slope()
    if cls.rho == 0:
        return LipschitzProfile(0.0, 0.0)
    if cls.kind == "linear-features":
        if cls.feature == "identity":
            return LipschitzProfile(0.0, slope)
        return LipschitzProfile(slope, slope)
    a, b = _mlp_param_jacobian_bound(cls.widths, cls.rho)
    return LipschitzProfile(slope * a, slope * b)


def input_lipschitz(cls: BoundedFunctionClass) -> float:
    """Bound on ||d h_theta / d x|| over the parameter ball."""
    slope = cls.squash_slope()
    if cls.kind == "linear-features":
        return slope * cls.rho
    if cls.kind == "mlp":
        return slope * _max_product(cls.rho, len(cls.widths) - 1)
    raise TypeError("finite dictionaries have no input derivative")


# ---------------------------------------------------------------------------
# Generator maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorMap:
    """theta -> Phi_theta, an MLP from noise space to sample space on a ball."""

    widths: tuple[int, ...]
    rho: float = 10.0

    @property
    def noise_dim(self) -> int:
        return self.widths[0]

    @property
    def out_dim(self) -> int:
        return self.widths[-1]

    @property
    def param_dim(self) -> int:
        return MLP(self.widths).n_params

    def to_dict(self) -> dict:
        return {"kind": "mlp", "widths": list(self.widths), "rho": self.rho}


def generator_map(widths: Sequence[int], rho: float = 10.0) -> GeneratorMap:
    widths = tuple(int(w) for w in widths)
    MLP(widths)
    return GeneratorMap(widths, float(rho))


def push(gmap: GeneratorMap, theta, z) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    _check_ball(theta, gmap.rho)
    out, _ = MLP(gmap.widths).forward(theta, np.atleast_2d(z))
    return out


def push_vjp(gmap: GeneratorMap, theta, z, cotangent):
    """(Phi_theta(z), sum_i <cot_i, d Phi_theta(z_i) / d theta>)."""
    theta = np.asarray(theta, dtype=float)
    _check_ball(theta, gmap.rho)
    net = MLP(gmap.widths)
    out, cache = net.forward(theta, np.atleast_2d(z))
    dtheta, _ = net.backward(cache, cotangent)
    return out, dtheta


def generator_lipschitz_profile(gmap: GeneratorMap) -> LipschitzProfile:
    if gmap.rho == 0:
        return LipschitzProfile(0.0, 0.0)
    a, b = _mlp_param_jacobian_bound(gmap.widths, gmap.rho)
    return LipschitzProfile(a, b)


def generator_output_bound(gmap: GeneratorMap) -> LipschitzProfile:
    """Affine bound on ||Phi_theta(z)|| over the parameter ball."""
    w = gmap.widths
    if len(w) == 2:
        return LipschitzProfile(gmap.rho, gmap.rho)
    return LipschitzProfile(gmap.rho * (math.sqrt(w[-2]) + 1.0), 0.0)


def composite_lipschitz_profile(cls: BoundedFunctionClass, gmap: GeneratorMap) -> LipschitzProfile:
    """Joint (psi, theta) Lipschitz bound for z -> h_psi(Phi_theta(z)).

    The joint parameter set sits inside the Euclidean ball of radius
    sqrt(rho_disc^2 + rho_gen^2).
    """
    disc = lipschitz_profile(cls)
    gen = generator_lipschitz_profile(gmap)
    out = generator_output_bound(gmap)
    lip_x = input_lipschitz(cls)

    def fn(z):
        znorm = np.linalg.norm(z, axis=1)
        xnorm = out.a + out.b * znorm
        l1 = disc.a + disc.b * xnorm
        l2 = lip_x * (gen.a + gen.b * znorm)
        return np.sqrt(l1 * l1 + l2 * l2)

    return LipschitzProfile(math.nan, math.nan, fn)


def composite_radius(cls: BoundedFunctionClass, gmap: GeneratorMap) -> float:
    return math.hypot(cls.rho, gmap.rho)
