"""Quadrature drivers over X and its boundary."""
from __future__ import annotations

import numpy as np

from .slope import mu_density


def integrate_interior(f, domain, *, resolution: int = 160) -> float:
    """Integral of a torus-invariant scalar over X against the reference volume.

    ``f`` is called on chart points; torus invariance is assumed (shipped
    integrands are functions of the moduli), so nodes sit at angle zero.
    """
    t, w = domain.t_rule(resolution=resolution)
    vals = np.array([f(np.sqrt(ti).astype(complex)) for ti in t], dtype=float)
    if not np.all(np.isfinite(vals)):
        bad = t[~np.isfinite(vals)][0]
        raise ValueError(f"integrand not finite near t = {bad}")
    return float(vals @ w)


def integrate_interior_radial(f_of_s, domain, *, resolution: int = 400,
                              s_max: float = 40.0) -> float:
    """Fast path for fully radial integrands f(s), s = ln|zeta|^2."""
    s, w = domain.radial_rule(resolution=resolution, s_max=s_max)
    vals = np.asarray(f_of_s(s), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("integrand not finite on the radial rule")
    return float(vals @ w)


def integrate_interior_mc(f, domain, *, samples: int = 20000, seed: int = 0,
                          s_max: float = 12.0):
    """Monte Carlo fallback for non-invariant integrands.

    Importance-samples s with density proportional to the radial reference
    density on [s0, s_max] and uniform angles.  Returns (value, standard error).
    """
    if domain.radial_s0 is None:
        raise NotImplementedError("MC fallback implemented for radial domains")
    rng = np.random.default_rng(seed)
    s0 = domain.radial_s0
    sg = np.linspace(s0, s_max, 4001)
    dens = np.exp(2 * sg - 3 * np.logaddexp(0, sg))
    cdf = np.cumsum(dens)
    total = cdf[-1] * (sg[1] - sg[0])
    cdf = cdf / cdf[-1]
    s = np.interp(rng.random(samples), cdf, sg)
    m = rng.random(samples)                      # sin^2 chi uniform on the 3-sphere
    th = rng.random((samples, 2)) * 2 * np.pi
    r = np.exp(0.5 * s)
    pts = np.column_stack([r * np.sqrt(1 - m) * np.exp(1j * th[:, 0]),
                           r * np.sqrt(m) * np.exp(1j * th[:, 1])])
    vals = np.array([f(p) for p in pts], dtype=float) * total
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples))


def integrate_boundary(f, domain, against: str = "sigma", weight=None, *,
                       n_lat: int = 64, n_theta: int = 8) -> float:
    """Boundary integral of f against surface measure or the slope-weighted density.

    against = "sigma": plain surface measure.
    against = "mu": weights each node by mu_density (requires ``weight``).
    """
    rule = domain.boundary_rule(n_lat=n_lat, n_theta=n_theta)
    w = rule.weights.copy()
    if against == "mu":
        if weight is None:
            raise ValueError("mu-weighted integral needs the weight")
        w = w * np.array([mu_density(weight, domain, p) for p in rule.points])
    elif against != "sigma":
        raise ValueError(f"unknown measure {against!r}")
    vals = np.array([f(p) for p in rule.points], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("integrand not finite on the boundary rule")
    return float(vals @ w)
