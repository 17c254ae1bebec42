"""Radial Monge-Ampere measures and their comparison.

The measure of an envelope chi is the increment measure of (chi')^n / n! on
the s-line: absolutely continuous where the slope moves smoothly, atomic
where it jumps.  Node masses are built directly from secant-slope increments,
so the total telescopes to the end-slope difference exactly, independent of
how individual nodes are classified.
"""
from __future__ import annotations

import dataclasses
from math import factorial

import numpy as np

from .envelope import Envelope, RadialProfile

ATOM_FLOOR = 1e-6


class CompatibilityError(RuntimeError):
    """Raised when the constant-slope hypothesis fails on a domain.

    Carries the sampled extremal-slope range so callers can report the
    counterexample instead of a bare failure.
    """

    def __init__(self, t_min: float, t_max: float):
        self.t_min = float(t_min)
        self.t_max = float(t_max)
        self.spread = self.t_max - self.t_min
        super().__init__(
            f"extremal slope varies over the boundary: "
            f"[{self.t_min:.6f}, {self.t_max:.6f}], spread {self.spread:.6f}")


@dataclasses.dataclass(frozen=True)
class RadialMeasure:
    """Density samples on an s-grid plus a list of atoms."""
    grid: np.ndarray
    density: np.ndarray
    atoms: tuple            # ((location, mass), ...)
    total_mass: float

    def __post_init__(self):
        if np.any(np.asarray(self.density) < -1e-12):
            raise ValueError("negative density")
        if any(m < -1e-12 for _, m in self.atoms):
            raise ValueError("negative atom mass")

    @property
    def h(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def atom_mass(self) -> float:
        return float(sum(m for _, m in self.atoms))

    def point_masses(self):
        """The measure as (locations, masses), density lumped at its nodes."""
        locs = list(self.grid)
        masses = list(np.asarray(self.density) * self.h)
        for loc, m in self.atoms:
            locs.append(loc)
            masses.append(m)
        order = np.argsort(locs, kind="stable")
        return np.asarray(locs)[order], np.asarray(masses)[order]


def radial_monge_ampere(env: Envelope, n: int = 2) -> RadialMeasure:
    """Increment measure of (chi')^n / n! for an envelope profile.

    Each interior node carries mass (g_j^n - g_{j-1}^n)/n! from its adjacent
    secant slopes; a node becomes an atom when its slope gap dwarfs both the
    absolute floor and the local gap scale of its neighbours (a smooth slope
    moves O(h) per node, a kink O(1), so the two separate cleanly once the
    grid resolves the profile).
    """
    chi = env.profile.values
    grid = env.profile.grid
    h = env.profile.h
    g = np.diff(chi) / h
    gaps = np.diff(g)
    node_mass = (g[1:] ** n - g[:-1] ** n) / factorial(n)

    win = 5
    atom_idx = []
    for j in np.nonzero(gaps > ATOM_FLOOR)[0]:
        lo, hi = max(0, j - win), min(len(gaps), j + win + 1)
        neigh = np.delete(gaps[lo:hi], j - lo)
        local = np.median(np.abs(neigh)) if neigh.size else 0.0
        if gaps[j] > max(ATOM_FLOOR, 8.0 * local):
            atom_idx.append(j)

    density = np.zeros(len(grid))
    atoms = []
    for j, m in enumerate(node_mass):
        if j in atom_idx:
            atoms.append((float(grid[j + 1]), float(m)))
        else:
            density[j + 1] = max(m, 0.0) / h
    total = float(np.sum(node_mass))
    return RadialMeasure(grid=grid, density=density, atoms=tuple(atoms),
                         total_mass=total)


def geometric_measure(weight, domain, *, s_min: float = -12.0,
                      s_max: float = 12.0, count: int = 2401,
                      t_samples: int = 16, t_tol: float = 1e-8) -> RadialMeasure:
    """Interior curvature mass plus the boundary slope measure, radially.

    Assembles the geometric side of the mass identity: the pushforward of the
    weight's curvature power restricted to the domain, plus one atom at the
    boundary shell carrying the full surface slope mass.  Refuses when the
    extremal slope is not constant over the boundary, reporting its range;
    the identity genuinely fails there.
    """
    from ..geometry.integrate import integrate_boundary
    from ..geometry.slope import slope_T

    rule = domain.boundary_rule() if domain.radial_s0 is None \
        else domain.boundary_rule(n_lat=t_samples, n_theta=1)
    pts = rule.points[:: max(1, len(rule.points) // t_samples)]
    tvals = [slope_T(weight, domain, p) for p in pts]
    t_lo, t_hi = min(tvals), max(tvals)
    if t_hi - t_lo > t_tol * max(1.0, abs(t_hi)):
        raise CompatibilityError(t_lo, t_hi)
    if domain.radial_s0 is None:
        raise ValueError("radial assembly needs a radial domain")
    if not weight.radial_flag:
        raise ValueError("radial assembly needs a radial weight")

    s0 = domain.radial_s0
    grid = np.linspace(s_min, s_max, count)
    n = domain.n
    rd = weight.radial
    density = np.zeros(len(grid))
    right = grid >= s0 - 1e-12
    sg = grid[right]
    density[right] = (rd.up(sg) ** (n - 1) * rd.upp(sg)
                      / factorial(n - 1))
    if density.min() < -1e-12:
        raise ValueError("interior curvature density is negative")
    density = np.maximum(density, 0.0)
    # the density jumps on at the shell; store the jump mean there so that
    # uniform node lumping integrates the truncated density correctly
    j0 = int(np.argmax(right))
    density[j0] *= 0.5
    boundary_mass = integrate_boundary(lambda p: 1.0, domain, against="mu",
                                       weight=weight)
    atoms = ((float(s0), float(boundary_mass)),)
    h = grid[1] - grid[0]
    total = boundary_mass + float(np.sum(density) * h)
    return RadialMeasure(grid=grid, density=density, atoms=atoms,
                         total_mass=total)


@dataclasses.dataclass(frozen=True)
class MeasureComparison:
    w1: float
    total_delta: float
    atom_deltas: tuple     # ((location, mass_a, mass_b), ...)


def compare_measures(a: RadialMeasure, b: RadialMeasure) -> MeasureComparison:
    """Wasserstein-1 distance on the line plus per-atom mass differences."""
    la, ma = a.point_masses()
    lb, mb = b.point_masses()
    locs = np.concatenate([la, lb])
    signed = np.concatenate([ma, -mb])
    order = np.argsort(locs, kind="stable")
    locs, signed = locs[order], signed[order]
    cdf = np.cumsum(signed)
    w1 = float(np.sum(np.abs(cdf[:-1]) * np.diff(locs)))

    def _atoms(m):
        out = {}
        for loc, mass in m.atoms:
            key = round(loc, 6)
            out[key] = out.get(key, 0.0) + mass
        return out

    da, db = _atoms(a), _atoms(b)
    deltas = tuple((loc, da.get(loc, 0.0), db.get(loc, 0.0))
                   for loc in sorted(set(da) | set(db)))
    return MeasureComparison(w1=w1,
                             total_delta=float(a.total_mass - b.total_mass),
                             atom_deltas=deltas)
