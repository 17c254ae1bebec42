"""Weights, domains, curvature forms, slope data, frames, and quadrature."""
from .weights import (Weight, RadialData, fubini_study_weight, log_norm_weight,
                      quadratic_weight, sampled_radial_weight, load_profile_file,
                      weight_by_name)
from .domains import (Domain, BoundaryRule, ball_exterior, ball_exterior_affine,
                      ellipsoid_exterior, domain_by_name)
from .forms import HermitianForm, ma_density, omega_density
from .slope import tangent_basis, slope_T, mu_density
from .integrate import (integrate_interior, integrate_interior_radial,
                        integrate_interior_mc, integrate_boundary)
from .frames import InteriorFrame, BoundaryFrame, interior_frame, adapted_frame

__all__ = [
    "Weight", "RadialData", "fubini_study_weight", "log_norm_weight",
    "quadratic_weight", "sampled_radial_weight", "load_profile_file",
    "weight_by_name",
    "Domain", "BoundaryRule", "ball_exterior", "ball_exterior_affine",
    "ellipsoid_exterior", "domain_by_name",
    "HermitianForm", "ma_density", "omega_density",
    "tangent_basis", "slope_T", "mu_density",
    "integrate_interior", "integrate_interior_radial", "integrate_interior_mc",
    "integrate_boundary",
    "InteriorFrame", "BoundaryFrame", "interior_frame", "adapted_frame",
]
