"""Model Bergman kernels for interior and boundary scaling centers."""
from .moments import moment_ladder
from .models import (
    InteriorModel,
    BoundaryModel,
    interior_kernel,
    interior_bergman,
    boundary_bergman,
    boundary_kernel_integral,
    boundary_kernel_closed,
    slope_profile,
    slope_derivative,
    model_metric_form,
    model_volume_density,
)

__all__ = [
    "moment_ladder",
    "InteriorModel",
    "BoundaryModel",
    "interior_kernel",
    "interior_bergman",
    "boundary_bergman",
    "boundary_kernel_integral",
    "boundary_kernel_closed",
    "slope_profile",
    "slope_derivative",
    "model_metric_form",
    "model_volume_density",
]
