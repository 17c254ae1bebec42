"""Experiment configs, drivers, reports, and the service/CLI front ends."""
from .config import (DEFAULT_K_LIST, DEFAULT_TOLERANCES, EXPERIMENTS,
                     GENERAL_PATH_K_CAP, ExperimentConfig, apply_overrides,
                     load_config)
from .experiments import (RUNNERS, run_all, run_appendix_bound, run_bm_bound,
                          run_equilibrium, run_morse, run_rate_fit,
                          run_scaling_boundary, run_scaling_interior,
                          run_weak_star)
from .report import (ConvergenceReport, emit_report, environment_fingerprint,
                     load_summary)

__all__ = [
    "DEFAULT_K_LIST", "DEFAULT_TOLERANCES", "EXPERIMENTS",
    "GENERAL_PATH_K_CAP", "ExperimentConfig", "apply_overrides", "load_config",
    "RUNNERS", "run_all", "run_appendix_bound", "run_bm_bound",
    "run_equilibrium", "run_morse", "run_rate_fit", "run_scaling_boundary",
    "run_scaling_interior", "run_weak_star",
    "ConvergenceReport", "emit_report", "environment_fingerprint",
    "load_summary",
]
