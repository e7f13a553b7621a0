"""(f, Gamma)-divergence estimation, finite-sample bounds and desk-scale GANs."""

from .bounds import (
    BoundInputs,
    BoundReport,
    bound,
    bound_at_confidence,
    estimation_bounds,
    gan_bound,
    gan_bound_zero_approx,
    lq_bound,
    reverse_gan_bound,
)
from .cgf import delta_f, lambda_empirical, lambda_lipschitz_const
from .discriminators import (
    BoundedFunctionClass,
    GeneratorMap,
    dictionary_class,
    generator_map,
    linear_class,
    mlp_class,
)
from .divergence import Sample, estimate_divergence, estimate_divergence_exact, estimate_ipm, f_divergence_discrete
from .generators import DivergenceGenerator, IncompatibleGeneratorError, custom_generator, make_generator
from .rademacher import dudley_ball_bound, dudley_integral_bound, empirical_rademacher, k_quantity

__version__ = "0.1.0"

__all__ = [
    "BoundInputs",
    "BoundReport",
    "BoundedFunctionClass",
    "DivergenceGenerator",
    "GeneratorMap",
    "IncompatibleGeneratorError",
    "Sample",
    "bound",
    "bound_at_confidence",
    "custom_generator",
    "delta_f",
    "dictionary_class",
    "dudley_ball_bound",
    "dudley_integral_bound",
    "empirical_rademacher",
    "estimate_divergence",
    "estimate_divergence_exact",
    "estimate_ipm",
    "estimation_bounds",
    "f_divergence_discrete",
    "gan_bound",
    "gan_bound_zero_approx",
    "generator_map",
    "k_quantity",
    "lambda_empirical",
    "lambda_lipschitz_const",
    "linear_class",
    "lq_bound",
    "make_generator",
    "mlp_class",
    "reverse_gan_bound",
]
