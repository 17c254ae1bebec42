"""Experiment configuration: ids, k schedules, and every gate tolerance.

Pass/fail thresholds are data, not code.  Each experiment reads its gates
from the tolerance table of the active config, so a rerun with overridden
tolerances changes verdicts without touching any module.
"""
from __future__ import annotations

import dataclasses
from pathlib import Path
from typing import Optional

from ..geometry.domains import domain_by_name
from ..geometry.weights import weight_by_name

DEFAULT_K_LIST = (8, 12, 16, 24, 32, 48, 64)
GENERAL_PATH_K_CAP = 24

DEFAULT_TOLERANCES = {
    # mass identity
    "morse_mass_tol": 1e-3,
    "morse_dim_gap_tol": 0.02,
    # slope constancy
    "slope_tol": 1e-8,
    "slope_spread_min": 0.1,
    # model kernels
    "model_identity_tol": 1e-10,
    "fiber_tol": 1e-8,
    "profile_endpoint_tol": 0.01,
    # scaling studies
    "interior_final_tol": 0.05,
    "boundary_profile_tol": 0.10,
    # weak-* pairings
    "weakstar_bump_tol": 0.02,
    "weakstar_collar_tol": 0.05,
    # equilibrium rate and measures
    "rate_coeff_lo": 1.5,
    "rate_coeff_hi": 6.0,
    "rate_bound_factor": 3.0,
    "w1_tol": 1e-3,
    # norm-growth exponent
    "bm_drift_tol": 0.20,
    "bm_drift_kmin": 24,
    "appendix_margin": 0.05,
    # structural identities
    "trace_tol": 1e-5,
    "reproducing_tol": 1e-6,
    "diagonality_tol": 1e-12,
    "metric_fd_tol": 1e-5,
}

EXPERIMENTS = ("morse", "scale-int", "scale-bd", "weakstar", "rate", "bm",
               "appendix", "equilibrium")


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    weight: str = "fs"
    domain: str = "ball"
    k_list: tuple = DEFAULT_K_LIST
    weight_params: Optional[dict] = None
    domain_params: Optional[dict] = None
    resolution: Optional[int] = None
    seed: int = 0
    out_dir: str = "out"
    cache_dir: Optional[str] = None
    tolerances: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS + ("all",):
            raise ValueError(f"unknown experiment {self.experiment!r}")
        ks = tuple(int(k) for k in self.k_list)
        if any(k <= 0 for k in ks):
            raise ValueError("k values must be positive")
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("k_list must be strictly increasing")
        object.__setattr__(self, "k_list", ks)
        # ids must resolve now, not at run time
        weight_by_name(self.weight, self.weight_params)
        domain_by_name(self.domain, self.domain_params)
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ValueError(f"unknown tolerance keys {sorted(unknown)}")

    def tol(self, key: str) -> float:
        if key in self.tolerances:
            return self.tolerances[key]
        return DEFAULT_TOLERANCES[key]

    def make_weight(self):
        return weight_by_name(self.weight, self.weight_params)

    def make_domain(self):
        return domain_by_name(self.domain, self.domain_params)

    def replace(self, **kw) -> "ExperimentConfig":
        return dataclasses.replace(self, **kw)


def _parse_value(text: str):
    text = text.strip()
    if "," in text:
        return tuple(_parse_value(t) for t in text.split(",") if t.strip())
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def load_config(path, experiment: str = "all") -> ExperimentConfig:
    """Read a key=value file; lines starting with # are comments.

    Tolerance entries use a tol. prefix: tol.w1_tol=1e-3.  Parameter entries
    use weight. / domain. prefixes and are collected into the params dicts.
    """
    fields = {"experiment": experiment}
    tols, wparams, dparams = {}, {}, {}
    for ln_no, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{ln_no}: expected key=value")
        key, val = line.split("=", 1)
        key = key.strip()
        if key.startswith("tol."):
            tols[key[4:]] = float(val)
        elif key.startswith("weight."):
            wparams[key[7:]] = _parse_value(val)
        elif key.startswith("domain."):
            dparams[key[7:]] = _parse_value(val)
        else:
            fields[key] = _parse_value(val)
    if "k_list" in fields and not isinstance(fields["k_list"], tuple):
        fields["k_list"] = (fields["k_list"],)
    if tols:
        fields["tolerances"] = tols
    if wparams:
        fields["weight_params"] = wparams
    if dparams:
        fields["domain_params"] = dparams
    return ExperimentConfig(**fields)


def apply_overrides(config: ExperimentConfig, pairs) -> ExperimentConfig:
    """Fold KEY=VAL tolerance overrides into a new config."""
    tols = dict(config.tolerances)
    for pair in pairs or ():
        if "=" not in pair:
            raise ValueError(f"override {pair!r} is not KEY=VAL")
        key, val = pair.split("=", 1)
        tols[key.strip()] = float(val)
    return config.replace(tolerances=tols)
