"""Convex conjugates, the cumulant-like functional Lambda and its perturbation constant.

Run: python demos/01_conjugates_and_lambda.py
"""

import numpy as np

from fgamma.cgf import delta_f, lambda_empirical, log_mean_exp
from fgamma.generators import f_star, make_generator, validate_generator

# Every generator f has a conjugate f* with a fixed point z0 where the slope is 1.
for spec in ("kl", "js", "alpha:2", "alpha:3"):
    g = make_generator(spec)
    rep = validate_generator(g)
    print(f"{spec:8s} z0={g.z0:+.4f}  f*(z0)={float(f_star(g, g.z0)):+.4f}  identities ok: {rep.passed}")

# For KL, Lambda reduces to the log-mean-exp of the values.
x = np.random.default_rng(0).uniform(0, 1, 20)
kl = make_generator("kl")
print(f"\nkl Lambda = {lambda_empirical(x, kl).value:.12f}, log-mean-exp = {log_mean_exp(x):.12f}")

# Other generators need the one-dimensional minimisation over nu.
res = lambda_empirical(x, make_generator("alpha:2"))
print(f"alpha:2 Lambda = {res.value:.6f} at nu* = {res.nu_star:.6f}")

# Delta_{f,n} controls how much one sample can move Lambda; it lies between
# the range width and f*(width + z0) - z0.
print("\n   n   Delta_kl(0,1)")
for n in (1, 2, 10, 100, 1000):
    print(f"{n:4d}   {delta_f(kl, n, 0.0, 1.0):.6f}")
print(f"upper end of the sandwich: {float(f_star(kl, 1 + kl.z0)) - kl.z0:.6f}")
