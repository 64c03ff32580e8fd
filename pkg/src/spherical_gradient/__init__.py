"""Spherical gradient model: pull-back densities of c-convex gradient maps on S^n."""

from .density import density, density_grid, gradient_map, jacobian_parts, log_density
from .inference import ModelSpec, aic, compare_models, log_likelihood, mle_fit
from .potential import (
    CosineProfile, PotentialComponent, PotentialSpec, QuadraticSpec, blend, potential_gradient,
    potential_value, profile_eval, quadratic_to_components, validate_spec,
)
from .sampler import inverse_gradient_map, sample, sample_batch
from .sphere import c_segment, cost, exp_map, geodesic_distance, log_map, tangent_basis, uniform_sample

__version__ = "0.1.0"
