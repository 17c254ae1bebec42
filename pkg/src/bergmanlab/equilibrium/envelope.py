"""Radial equilibrium envelopes by alternating projection.

On torus-invariant data the global envelope problem collapses to one real
variable s = ln r^2: find the largest function on the line that is convex,
has slopes in [0, 1], and sits below the weight profile on the image of the
domain.  The slope window encodes positivity of the current at the origin
(lower bound) and the growth class of the line bundle (upper bound); the
derivation lives in the package docs, not here.

The solver iterates three pull-down projections (constraint clip, lower
convex hull, slope clip) from an explicit majorant.  Each step is monotone
and maps majorants of the solution to majorants, so the iteration converges
from above; the fixed point is the envelope.
"""
from __future__ import annotations

import dataclasses
import warnings

import numpy as np


@dataclasses.dataclass(frozen=True)
class RadialProfile:
    """Function samples on a uniform grid in s = ln r^2."""
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape or len(g) < 3:
            raise ValueError("grid and values must be matching 1D arrays")
        h = np.diff(g)
        if h.min() <= 0 or abs(h.max() - h.min()) > 1e-9 * h.mean():
            raise ValueError("grid must be uniform and increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("profile values must be finite")
        if g[0] > -12.0 + 1e-9 or g[-1] < 12.0 - 1e-9:
            raise ValueError("grid must span [-12, 12]")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    @property
    def h(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def slopes(self) -> np.ndarray:
        """Secant slopes on the grid intervals."""
        return np.diff(self.values) / self.h

    def end_slopes(self):
        s = self.slopes()
        return float(s[0]), float(s[-1])

    @classmethod
    def from_weight(cls, weight, s_min: float = -12.0, s_max: float = 12.0,
                    count: int = 2401) -> "RadialProfile":
        if not weight.radial_flag:
            raise ValueError("radial profile needs a radial weight")
        g = np.linspace(s_min, s_max, count)
        return cls(g, np.asarray(weight.radial.u(g), dtype=float))


@dataclasses.dataclass(frozen=True)
class Envelope:
    """Solution of the radial envelope problem together with its data."""
    profile: RadialProfile
    constraint_mask: np.ndarray   # True where chi <= u was enforced
    u_values: np.ndarray          # the constraining profile on the same grid

    def __post_init__(self):
        chi = self.profile.values
        h = self.profile.h
        d2 = np.diff(chi, 2)
        if d2.min() < -1e-10:
            raise ValueError("envelope not convex on the grid")
        sl = np.diff(chi) / h
        if sl.min() < -1e-10 or sl.max() > 1.0 + 1e-10:
            raise ValueError("envelope slopes escape [0, 1]")
        gap = chi[self.constraint_mask] - self.u_values[self.constraint_mask]
        if gap.size and gap.max() > 1e-10:
            raise ValueError("envelope exceeds the constraint")


def _lower_hull(grid, vals):
    """Largest convex minorant of the sample points, on the same grid."""
    n = len(grid)
    idx = [0]
    for j in range(1, n):
        while len(idx) >= 2:
            i0, i1 = idx[-2], idx[-1]
            # drop i1 if it lies on or above chord (i0, j)
            lhs = (vals[i1] - vals[i0]) * (grid[j] - grid[i1])
            rhs = (vals[j] - vals[i1]) * (grid[i1] - grid[i0])
            if lhs >= rhs:
                idx.pop()
            else:
                break
        idx.append(j)
    return np.interp(grid, grid[idx], vals[idx])


def _slope_clip(vals, h):
    """Enforce slopes in [0, 1] by pull-down passes; preserves convexity.

    Slope <= 1 means vals - j h is nonincreasing; slope >= 0 means vals is
    nondecreasing, i.e. each value at most the minimum to its right.  Both
    are running minima.
    """
    line = h * np.arange(len(vals))
    out = np.minimum.accumulate(vals - line) + line
    return np.minimum.accumulate(out[::-1])[::-1]


def radial_envelope(u: RadialProfile, x_region, *, tol: float = 1e-8,
                    max_cycles: int = 5000) -> Envelope:
    """Largest convex function with slopes in [0, 1] below u on x_region.

    x_region is an (s_lo, s_hi) interval; the constraint is enforced on the
    grid nodes it contains.  Converges monotonically from an explicit
    majorant; raises if the projection cycle stalls above tolerance.
    """
    grid, h = u.grid, u.h
    s_lo, s_hi = float(x_region[0]), float(x_region[1])
    mask = (grid >= s_lo - 1e-12) & (grid <= s_hi + 1e-12)
    if not mask.any():
        raise ValueError("constraint region contains no grid nodes")
    if not np.all(np.isfinite(u.values[mask])):
        raise ValueError("constraint values must be finite on the region")

    # majorant: the largest function with slopes in [0,1] below u on the
    # region, ignoring convexity; finite everywhere after both passes
    big = u.values[mask].max() + (grid[-1] - grid[0]) + 1.0
    chi = _slope_clip(np.where(mask, u.values, big), h)

    for _ in range(max_cycles):
        prev = chi
        chi = np.where(mask, np.minimum(chi, u.values), chi)
        chi = _lower_hull(grid, chi)
        chi = _slope_clip(chi, h)
        if np.max(prev - chi) < 1e-12 * max(1.0, np.abs(chi).max()):
            break
    else:
        resid = float(np.max(prev - chi))
        raise RuntimeError(f"envelope iteration stalled; residual {resid:.3e}")

    resid = float(np.max(np.where(mask, chi - u.values, -np.inf)))
    if resid > tol:
        raise RuntimeError(f"constraint residual {resid:.3e} above tolerance")
    return Envelope(profile=RadialProfile(grid, chi), constraint_mask=mask,
                    u_values=u.values.copy())


def envelope_from_kernel(states, *, s_min: float = -12.0, s_max: float = 12.0,
                         count: int = 2401):
    """Normalized log-kernel profile at the largest k, with an error estimate.

    Takes kernel states for at least two k values, samples k^{-1} ln K on the
    radial grid for each, and extrapolates the sup distance between the last
    two profiles through the ln k / k convergence rate.  Returns
    (RadialProfile, estimated sup error).
    """
    from ..bergman_core.kernels import radial_log_kernel

    states = sorted(states, key=lambda st: st.k)
    ks = [st.k for st in states]
    if len(set(ks)) < 2:
        raise ValueError("need at least two distinct k values")
    grid = np.linspace(s_min, s_max, count)
    profiles = [radial_log_kernel(st, grid) / st.k for st in states]
    diffs = [float(np.max(np.abs(profiles[i] - profiles[i - 1])))
             for i in range(1, len(profiles))]
    rate = lambda k: np.log(k) / k
    # raw consecutive distances scale with the ln k / k increment of each
    # step, so on uneven schedules only the normalized constants are
    # comparable; those must not grow
    gaps = [max(rate(a) - rate(b), 1e-12) for a, b in zip(ks, ks[1:])]
    consts = [d / g for d, g in zip(diffs, gaps)]
    if any(consts[i] > consts[i - 1] * 1.05 for i in range(1, len(consts))):
        warnings.warn("profile distances outgrow the ln k / k rate; "
                      "the largest-k profile may be under-resolved",
                      RuntimeWarning, stacklevel=2)
    r = rate(ks[-1]) / rate(ks[-2])
    err = diffs[-1] * r / max(1.0 - r, 1e-6)
    return RadialProfile(grid, profiles[-1]), float(err)
