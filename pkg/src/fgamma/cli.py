"""Command-line interface: estimate, bound, rademacher, gan and verify.

Exit codes: 0 success, 1 user error (one-line diagnostic on stderr),
2 internal invariant violation or failed verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import discriminators as dsc
from . import ganlab, verify
from ._parallel import set_threads
from .bounds import SETTINGS, ALIASES, BoundInputs, bound, bound_at_confidence, canonical_setting, sweep
from .divergence import AscentConfig, Sample, estimate_divergence
from .generators import check_compatibility, make_generator
from .rademacher import dudley_certificate, empirical_rademacher


class UserError(Exception):
    """Bad input: reported on one line with exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UserError(message)


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def _plain(o):
    if isinstance(o, dict):
        return {str(k): _plain(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_plain(v) for v in o]
    if isinstance(o, np.ndarray):
        return [_plain(v) for v in o.tolist()]
    if isinstance(o, (np.floating, float)):
        v = float(o)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(o, np.integer):
        return int(o)
    return o


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UserError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in _floats(text))


# ---------------------------------------------------------------------------
# Shared argument groups
# ---------------------------------------------------------------------------


def _add_range(p):
    p.add_argument("--alpha", type=float, required=True, help="lower end of the discriminator range")
    p.add_argument("--beta", type=float, required=True, help="upper end of the discriminator range")


def _add_class(p):
    p.add_argument("--class", dest="cls", choices=("mlp", "linear", "dictionary"), default="mlp")
    p.add_argument("--widths", default="1,8,1", help="mlp layer widths, e.g. 1,16,16,1")
    p.add_argument("--dim", type=int, default=1, help="input dimension of a linear class")
    p.add_argument("--feature", choices=("identity", "affine"), default="affine")
    p.add_argument("--rho", type=float, default=1.0, help="parameter-ball radius")
    p.add_argument("--table", help="dictionary CSV: first row support points, then one row per member")


def _build_class(args, alpha: float, beta: float):
    if args.cls == "mlp":
        return dsc.mlp_class(_ints(args.widths), args.rho, (alpha, beta))
    if args.cls == "linear":
        return dsc.linear_class(args.dim, args.feature, args.rho, (alpha, beta))
    if not args.table:
        raise UserError("--class dictionary needs --table")
    rows = Sample.from_csv(args.table).points
    if rows.shape[0] < 2:
        raise UserError("dictionary table needs a support row and at least one member row")
    return dsc.dictionary_class(rows[0], rows[1:], (alpha, beta))


def _load_sample(path: Optional[str], target: Optional[str], size: int, seed: int, name: str) -> Sample:
    if path:
        return Sample.from_csv(path)
    if target:
        return ganlab.sample_target(ganlab.SyntheticTarget.parse(target), size, seed)
    raise UserError(f"need --{name} CSV or --{name}-target")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_estimate(args) -> int:
    gen = make_generator(args.gen)
    msg = check_compatibility(gen, args.alpha, args.beta)
    if msg:
        raise UserError(msg)
    cls = _build_class(args, args.alpha, args.beta)
    q = _load_sample(args.q, args.q_target, args.n, args.seed * 2 + 1, "q")
    p = _load_sample(args.p, args.p_target, args.m, args.seed * 2 + 2, "p")
    if cls.kind != "finite-dictionary" and (q.dim != cls.input_dim or p.dim != cls.input_dim):
        raise UserError(f"sample dimension does not match class input dimension {cls.input_dim}")
    opt = AscentConfig(steps=args.steps, restarts=args.restarts, lr=args.lr, seed=args.seed)
    res = estimate_divergence(gen, cls, q, p, opt)
    out = res.to_dict()
    out.update({"generator": gen.spec, "alpha": args.alpha, "beta": args.beta, "n": q.n, "m": p.n, "class": cls.kind})
    _emit(dumps(out), args.out)
    return 0


def _bound_inputs(args) -> BoundInputs:
    prov = {"r": args.r_source, "k": args.k_source, "eps_approx": "user-supplied", "eps_opt": "user-supplied"}
    if args.delta_f is not None:
        prov["delta_f"] = "user-supplied"
    return BoundInputs(
        n=args.n,
        m=args.m,
        alpha=args.alpha,
        beta=args.beta,
        epsilon=args.epsilon,
        generator=make_generator(args.gen),
        eps_approx=args.eps_approx,
        eps_opt=args.eps_opt,
        r=args.r,
        k=args.k,
        delta_f=args.delta_f,
        provenance=prov,
    )


def cmd_bound(args) -> int:
    setting = canonical_setting(args.setting)
    gen = make_generator(args.gen)
    msg = check_compatibility(gen, args.alpha, args.beta)
    if msg:
        raise UserError(msg)
    inp = _bound_inputs(args)
    if args.sweep:
        var, _, vals = args.sweep.partition("=")
        if var not in ("epsilon", "n", "m") or not vals:
            raise UserError("--sweep takes VAR=v1,v2,... with VAR in epsilon, n, m")
        if var != "epsilon" and inp.epsilon is None:
            raise UserError("sweeping n or m needs --epsilon")
        reps = sweep(setting, inp, var, _floats(vals))
        header = ("setting", "n", "m", "epsilon", "threshold", "tail_probability", "denominator", "delta_f", "label")
        rows = [
            (r.setting, r.inputs["n"], r.inputs["m"], r.inputs["epsilon"], r.threshold, r.tail_probability, r.denominator, r.inputs["delta_f"], r.label)
            for r in reps
        ]
        _emit(_csv_text(header, rows), args.out)
        return 0
    if (args.epsilon is None) == (args.delta is None):
        raise UserError("give exactly one of --epsilon or --delta")
    rep = bound(setting, inp) if args.delta is None else bound_at_confidence(setting, inp, args.delta)
    d = rep.to_dict()
    d["tail"] = rep.tail_probability
    if args.csv:
        keys = ("setting", "threshold", "tail_probability", "denominator", "label")
        _emit(_csv_text(keys, [[d[k] for k in keys]]), args.out)
    else:
        _emit(dumps(d), args.out)
    return 0


def cmd_rademacher(args) -> int:
    alpha, beta = _floats(args.range)
    cls = _build_class(args, alpha, beta)
    y = _load_sample(args.sample, args.target, args.n, args.seed + 7, "sample")
    opt = AscentConfig(steps=args.steps, restarts=3, lr=0.05, patience=30)
    est = empirical_rademacher(cls, y, draws=args.draws, seed=args.seed, exact=args.exact, opt=opt)
    out = est.to_dict()
    if cls.kind != "finite-dictionary":
        if y.dim != cls.input_dim:
            raise UserError(f"sample dimension does not match class input dimension {cls.input_dim}")
        out["dudley"] = dudley_certificate(cls, y)
    _emit(dumps(out), args.out)
    return 0


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise UserError(f"config {path} is not valid JSON: {exc}") from None


def cmd_gan(args) -> int:
    raw = _load_config(args.config)
    if args.seed_given:
        raw["seed"] = args.seed
    cfg, target = ganlab.config_from_dict(raw)
    if args.mode == "sweep":
        sw = raw.get("sweep", {})
        ns = _ints(args.ns) if args.ns else tuple(sw.get("ns", (50, 100, 200)))
        reps = args.reps or int(sw.get("reps", 3))
        rows = ganlab.consistency_experiment(cfg, target, ns, reps, seed=cfg.seed, delta=float(sw.get("delta", 0.05)))
        text = _csv_text(ganlab.SWEEP_COLUMNS, [[r[c] for c in ganlab.SWEEP_COLUMNS] for r in rows])
        _emit(text, args.out)
        return 0
    trace = ganlab.train_gan(cfg, target)
    summary = trace.summary()
    summary.update({"seed": cfg.seed, "target": target.to_dict(), "generator": cfg.gen.spec})
    if args.trace:
        Path(args.trace).write_text(_csv_text(ganlab.TRACE_COLUMNS, trace.rows()), encoding="utf-8")
    _emit(dumps(summary), args.out)
    return 0


def cmd_verify(args) -> int:
    rep = verify.run_suite(args.suite, args.budget, args.seed)
    if args.json:
        _emit(dumps(rep.to_dict()), args.out)
    else:
        lines = [c.line() for c in rep.checks]
        lines.append(f"{rep.n_pass} passed, {rep.n_fail} failed")
        _emit("\n".join(lines) + "\n", args.out)
    return 0 if rep.n_fail == 0 else 2


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    # SUPPRESS keeps a subcommand from resetting values given before it
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed (default 0)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="task-pool size (env FGAMMA_THREADS)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="write the result here instead of stdout")

    parser = _Parser(prog="fgamma", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("estimate", parents=[common], help="estimate D_f^Gamma(Q_n || P_m)")
    p.add_argument("--gen", required=True)
    _add_range(p)
    _add_class(p)
    p.add_argument("--q", help="CSV sample from Q")
    p.add_argument("--p", help="CSV sample from P")
    p.add_argument("--q-target", help="synthetic Q, e.g. gaussian:0:1")
    p.add_argument("--p-target", help="synthetic P, e.g. gaussian:1:1")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--m", type=int, default=500)
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--lr", type=float, default=0.05)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("bound", parents=[common], help="concentration-bound calculator")
    p.add_argument("--setting", required=True, choices=SETTINGS + tuple(ALIASES))
    p.add_argument("--gen", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    _add_range(p)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta", type=float, help="confidence level; solves for epsilon")
    p.add_argument("--r", type=float, default=0.0)
    p.add_argument("--k", type=float, default=0.0)
    p.add_argument("--r-source", choices=("certified", "estimated", "user-supplied"), default="user-supplied")
    p.add_argument("--k-source", choices=("certified", "estimated", "user-supplied"), default="user-supplied")
    p.add_argument("--eps-approx", type=float, default=0.0)
    p.add_argument("--eps-opt", type=float, default=0.0)
    p.add_argument("--delta-f", type=float, help="override the computed perturbation constant")
    p.add_argument("--csv", action="store_true", help="CSV instead of JSON")
    p.add_argument("--sweep", help="VAR=v1,v2,... over epsilon, n or m (CSV output)")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("rademacher", parents=[common], help="empirical Rademacher complexity")
    _add_class(p)
    p.add_argument("--range", default="0,1", help="alpha,beta of the class range")
    p.add_argument("--sample", help="CSV points")
    p.add_argument("--target", help="synthetic points, e.g. gaussian:0:1")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--draws", type=int, default=200)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--exact", action="store_true", help="enumerate all sign vectors (dictionaries, n <= 20)")
    p.set_defaults(func=cmd_rademacher)

    p = sub.add_parser("gan", parents=[common], help="train a desk-scale (f, Gamma)-GAN")
    p.add_argument("mode", nargs="?", choices=("run", "sweep"), default="run")
    p.add_argument("--config", required=True, help="JSON config (see docs/gan_config.schema.json)")
    p.add_argument("--trace", help="per-round trace CSV (run mode)")
    p.add_argument("--ns", help="comma-separated n values (sweep mode)")
    p.add_argument("--reps", type=int, help="trainings per n (sweep mode, >= 3)")
    p.set_defaults(func=cmd_gan)

    p = sub.add_parser("verify", parents=[common], help="run the oracle suites")
    p.add_argument("--suite", default="all", choices=verify.SUITES + ("all",))
    p.add_argument("--budget", default="quick", choices=verify.BUDGETS)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UserError("missing subcommand (estimate, bound, rademacher, gan, verify)")
        args.seed_given = hasattr(args, "seed")
        args.seed = getattr(args, "seed", 0)
        args.out = getattr(args, "out", None)
        if args.seed < 0:
            raise UserError("--seed must be >= 0")
        threads = getattr(args, "threads", None)
        if threads is not None:
            if threads < 1:
                raise UserError("--threads must be >= 1")
            set_threads(threads)
        return args.func(args)
    except (UserError, ValueError, OSError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"fgamma: error: {msg}", file=sys.stderr)
        return 1
    except Exception as exc:  # invariant violations and numerical breakdowns
        print(f"fgamma: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
