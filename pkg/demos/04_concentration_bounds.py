"""Concentration bounds for GAN and estimation errors, and a Monte Carlo check.

Run: python demos/04_concentration_bounds.py
"""

from fgamma.bounds import BoundInputs, bound_at_confidence, estimation_bounds, gan_bound, reverse_gan_bound
from fgamma.generators import make_generator
from fgamma.verify import tail_experiment

inp = BoundInputs(n=1000, m=1000, alpha=0.0, beta=1.0, epsilon=0.1, generator="kl", r=0.02, k=0.05)

fwd = gan_bound(inp)
rev = reverse_gan_bound(inp)
print(f"forward GAN: P(error > {fwd.threshold:.3f}) <= {fwd.tail_probability:.3e}")
print(f"reverse GAN: P(error > {rev.threshold:.3f}) <= {rev.tail_probability:.3e}")
lower, upper = estimation_bounds(inp)
print(f"estimation:  upper tail {upper.tail_probability:.3e} above {upper.threshold:.3f}, lower tail {lower.tail_probability:.3e}")

# Inverting the tail gives the error level reached with 95% confidence.
rep = bound_at_confidence("gan", inp, 0.05)
print(f"\nwith probability 0.95 the forward GAN error is below {rep.threshold:.4f}")

# Simulated Q = P estimation on four atoms: observed tail frequencies stay under the bound.
print("\n eps    bound     upper    lower    centred")
for row in tail_experiment(make_generator("kl"), 20, 20, 2000, (0.05, 0.1, 0.2), seed=0):
    print(f"{row['epsilon']:.2f}  {row['tail']:.4f}   {row['upper']:.4f}   {row['lower']:.4f}   {row['centered']:.4f}")
