"""HTTP facade over the experiment drivers.

The service is stateless: every request carries a full experiment
description and returns the resulting reports.  File output is the
caller's business; the CLI writes CSV/JSON tables client-side from the
response body.
"""
from __future__ import annotations

from typing import Dict, List, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from ..equilibrium import CompatibilityError
from .config import (DEFAULT_K_LIST, DEFAULT_TOLERANCES, EXPERIMENTS,
                     ExperimentConfig)
from .experiments import ALL_DEFAULTS, RUNNERS, run_all
from .report import environment_fingerprint


class ConfigModel(BaseModel):
    """Wire form of an experiment config; unset fields take defaults."""

    experiment: str
    weight: str = "fs"
    domain: str = "ball"
    k_list: Optional[List[int]] = None
    weight_params: Optional[Dict[str, float]] = None
    domain_params: Optional[Dict[str, float]] = None
    resolution: Optional[int] = None
    seed: int = 0
    cache_dir: Optional[str] = None
    tolerances: Dict[str, float] = Field(default_factory=dict)

    def to_config(self) -> ExperimentConfig:
        data = self.model_dump()
        if data["k_list"] is None:
            data.pop("k_list")
        else:
            data["k_list"] = tuple(data["k_list"])
        return ExperimentConfig(**data)


class ReportModel(BaseModel):
    experiment: str
    k_list: List[int]
    diagnostics: Dict[str, List[float]]
    scalars: Dict[str, float]
    gates: Dict[str, bool]
    tolerances: Dict[str, float]
    passed: bool

    @classmethod
    def from_report(cls, rep) -> "ReportModel":
        return cls(**rep.to_dict())


class RunResponse(BaseModel):
    reports: List[ReportModel]
    all_passed: bool
    environment: Dict[str, str]


app = FastAPI(
    title="bergmanlab",
    description="Weighted Bergman kernels on pseudoconcave domains: "
                "scaling limits, weak-* pairings, mass identities, and "
                "equilibrium measures at desk scale.",
)


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.get("/experiments")
def experiments() -> dict:
    """Experiment ids, defaults, and the canonical example pairings."""
    return {
        "experiments": list(EXPERIMENTS) + ["all"],
        "default_k_list": list(DEFAULT_K_LIST),
        "default_tolerances": DEFAULT_TOLERANCES,
        "all_defaults": ALL_DEFAULTS,
    }


@app.post("/run", response_model=RunResponse)
def run(model: ConfigModel) -> RunResponse:
    try:
        config = model.to_config()
    except (ValueError, KeyError) as exc:
        # KeyError carries unknown weight/domain ids from the registries
        raise HTTPException(status_code=422, detail=str(exc))
    try:
        if config.experiment == "all":
            reports = run_all(config)
        else:
            reports = [RUNNERS[config.experiment](config)]
    except CompatibilityError as exc:
        raise HTTPException(
            status_code=409,
            detail=f"incompatible example: slope spread {exc.spread:.4f} "
                   f"over [{exc.t_min:.4f}, {exc.t_max:.4f}]")
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return RunResponse(
        reports=[ReportModel.from_report(r) for r in reports],
        all_passed=all(r.passed for r in reports),
        environment=environment_fingerprint(),
    )
