"""Numerical laboratory for weighted Bergman kernels on pseudoconcave domains.

Subpackages:
    geometry       weights, domains, curvature, slope data, frames, quadrature
    bergman_core   polynomial Hilbert spaces, Gram matrices, kernel evaluators
    model_kernels  flat interior and half-space boundary model kernels
    equilibrium    radial envelopes and equilibrium measures
    harness        experiment runners, reports, HTTP service, CLI
"""

__version__ = "0.1.0"
