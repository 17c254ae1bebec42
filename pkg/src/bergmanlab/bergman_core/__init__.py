"""Polynomial Hilbert spaces on X and their kernel machinery."""
from .basis import MonomialBasis, dimension
from .gram import (KernelState, build_gram, build_or_load, save_state,
                   load_state, cache_dir, ResolutionError, IllConditionedError,
                   CACHE_ENV)
from .kernels import (monomial_vector, kernel_eval, log_kernel_diag,
                      bergman_function, log_kernel_metric, radial_log_kernel,
                      radial_bergman)
from .metrics import (bergman_metric_form, bergman_volume_density, SupGrid,
                      sup_metric)

__all__ = [
    "MonomialBasis", "dimension",
    "KernelState", "build_gram", "build_or_load", "save_state", "load_state",
    "cache_dir", "ResolutionError", "IllConditionedError", "CACHE_ENV",
    "monomial_vector", "kernel_eval", "log_kernel_diag", "bergman_function",
    "log_kernel_metric", "radial_log_kernel", "radial_bergman",
    "bergman_metric_form", "bergman_volume_density", "SupGrid", "sup_metric",
]
