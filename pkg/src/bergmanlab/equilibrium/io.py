"""Two-column CSV persistence for radial profiles and measures."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .envelope import RadialProfile
from .measures import RadialMeasure


def save_profile(profile: RadialProfile, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["s", "value"])
        for s, v in zip(profile.grid, profile.values):
            w.writerow([repr(float(s)), repr(float(v))])
    return path


def load_profile(path) -> RadialProfile:
    rows = _read(path, 2)
    arr = np.asarray(rows, dtype=float)
    return RadialProfile(arr[:, 0], arr[:, 1])


def save_measure(measure: RadialMeasure, path, atoms_path) -> tuple:
    path, atoms_path = Path(path), Path(atoms_path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["s", "density"])
        for s, d in zip(measure.grid, measure.density):
            w.writerow([repr(float(s)), repr(float(d))])
    with atoms_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["location", "mass"])
        for loc, m in measure.atoms:
            w.writerow([repr(float(loc)), repr(float(m))])
    return path, atoms_path


def load_measure(path, atoms_path) -> RadialMeasure:
    dens = np.asarray(_read(path, 2), dtype=float)
    atom_rows = _read(atoms_path, 2)
    atoms = tuple((float(a), float(b)) for a, b in atom_rows)
    grid, density = dens[:, 0], dens[:, 1]
    h = grid[1] - grid[0]
    total = float(np.sum(density) * h + sum(m for _, m in atoms))
    return RadialMeasure(grid=grid, density=density, atoms=atoms,
                         total_mass=total)


def _read(path, ncols):
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) != ncols:
        raise ValueError(f"malformed table in {path}")
    return rows[1:]
