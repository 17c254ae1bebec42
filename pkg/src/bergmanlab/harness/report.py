"""Result containers and deterministic report emission.

CSV output is byte-reproducible: floats are written through repr, which is
the shortest round-tripping form, and no timestamps or machine-variable
content enter the tables.  The JSON summary carries the environment
fingerprint and the gate verdicts.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import platform
import sys
from pathlib import Path

import numpy as np
import scipy


@dataclasses.dataclass(frozen=True)
class ConvergenceReport:
    experiment: str
    k_list: tuple
    diagnostics: dict       # name -> tuple of per-k values
    scalars: dict           # name -> float
    gates: dict             # name -> bool
    tolerances: dict        # name -> threshold actually applied

    def __post_init__(self):
        for name, vals in self.diagnostics.items():
            vals = tuple(float(v) for v in vals)
            if len(vals) != len(self.k_list):
                raise ValueError(f"diagnostic {name!r} has {len(vals)} values "
                                 f"for {len(self.k_list)} k entries")
            self.diagnostics[name] = vals
        object.__setattr__(self, "k_list", tuple(int(k) for k in self.k_list))

    @property
    def passed(self) -> bool:
        return all(self.gates.values())

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "k_list": list(self.k_list),
            "diagnostics": {k: list(v) for k, v in self.diagnostics.items()},
            "scalars": dict(self.scalars),
            "gates": dict(self.gates),
            "tolerances": dict(self.tolerances),
            "passed": self.passed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConvergenceReport":
        return cls(experiment=d["experiment"], k_list=tuple(d["k_list"]),
                   diagnostics={k: tuple(v)
                                for k, v in d["diagnostics"].items()},
                   scalars=dict(d["scalars"]), gates=dict(d["gates"]),
                   tolerances=dict(d["tolerances"]))


def environment_fingerprint() -> dict:
    return {
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "platform": platform.platform(),
    }


def emit_report(reports, out_dir, formats=("csv", "json")) -> list:
    """Write per-experiment CSV tables, a long-format CSV, and a JSON summary.

    Returns the list of paths written.  The long table has exactly
    |k_list| x |diagnostics| rows per report.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        for rep in reports:
            path = out / f"{rep.experiment.replace('-', '_')}.csv"
            names = sorted(rep.diagnostics)
            with path.open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["k"] + names)
                for i, k in enumerate(rep.k_list):
                    w.writerow([k] + [repr(rep.diagnostics[n][i])
                                      for n in names])
            written.append(path)
        long_path = out / "long.csv"
        with long_path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["experiment", "k", "diagnostic", "value"])
            for rep in reports:
                for name in sorted(rep.diagnostics):
                    for k, v in zip(rep.k_list, rep.diagnostics[name]):
                        w.writerow([rep.experiment, k, name, repr(v)])
        written.append(long_path)
    if "json" in formats:
        summary = {
            "environment": environment_fingerprint(),
            "reports": [rep.to_dict() for rep in reports],
            "all_passed": all(rep.passed for rep in reports),
        }
        path = out / "summary.json"
        path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
        written.append(path)
    return written


def load_summary(path) -> list:
    data = json.loads(Path(path).read_text())
    return [ConvergenceReport.from_dict(d) for d in data["reports"]]
