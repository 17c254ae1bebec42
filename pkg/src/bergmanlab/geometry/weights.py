"""Metric potentials on the affine chart of P^n.

A weight is a smooth function phi on C^n with logarithmic growth, shipped
together with exact first and second derivative oracles.  Radial weights
additionally carry their profile u(s), s = ln|zeta|^2, which is what every
fast path in this package consumes.
"""
from __future__ import annotations

import dataclasses
from typing import Callable, Optional

import numpy as np


def _softplus(s):
    # stable ln(1+e^s); np.log1p(np.exp(s)) overflows for s > 700
    return np.logaddexp(0.0, s)


def _sigmoid(s):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(s, dtype=float)))


@dataclasses.dataclass(frozen=True)
class RadialData:
    """Profile u(s) with two derivatives, s = ln r^2.

    The chart Hessian of a radial weight is (u'/r^2) I + ((u''-u')/r^4) z z^H.
    At the origin both fractions become limits; weights smooth there supply
    the constants c0 = lim u'/r^2 and c1 = lim (u''-u')/r^4, singular weights
    leave them None and reject origin evaluation.
    """

    u: Callable[[np.ndarray], np.ndarray]
    up: Callable[[np.ndarray], np.ndarray]
    upp: Callable[[np.ndarray], np.ndarray]
    c0: Optional[float] = None
    c1: Optional[float] = None


@dataclasses.dataclass(frozen=True)
class Weight:
    """Hermitian metric potential in the fixed chart trivialization.

    ``hess`` returns H[a, b] = d^2 phi / (d zbar_a d z_b), the convention in
    which q(v) = v^H H v is the curvature quadratic form.  ``grad`` returns
    the holomorphic gradient (d phi / d z_a).
    """

    name: str
    phi: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Callable[[np.ndarray], np.ndarray]
    holo_hess: Callable[[np.ndarray], np.ndarray]
    radial: Optional[RadialData] = None
    params: tuple = ()

    @property
    def radial_flag(self) -> bool:
        return self.radial is not None

    def key(self) -> str:
        ptxt = ",".join(f"{p:.12g}" for p in self.params)
        return f"{self.name}({ptxt})"


def _radial_weight(name: str, data: RadialData, params: tuple = ()) -> Weight:
    """Assemble chart oracles from a radial profile.

    For phi = u(ln r^2):
        d_a phi          = u' zbar_a / r^2
        d^2/(dzbar_a dz_b) = (u'/r^2) I + (u'' - u') zbar-free form z z^H / r^4
        d_a d_b phi      = (u'' - u') zbar_a zbar_b / r^4
    """

    _EPS = 1e-12

    def _check_origin():
        if data.c0 is None:
            raise ValueError(f"weight {name!r} is singular at the origin")

    def phi(z):
        z = np.asarray(z, dtype=complex)
        r2 = float(np.vdot(z, z).real)
        if r2 < _EPS:
            _check_origin()
            return float(data.u(np.log(_EPS))) if r2 == 0.0 else float(data.u(np.log(r2)))
        return float(data.u(np.log(r2)))

    def grad(z):
        z = np.asarray(z, dtype=complex)
        r2 = float(np.vdot(z, z).real)
        if r2 < _EPS:
            _check_origin()
            return data.c0 * np.conj(z)
        return float(data.up(np.log(r2))) * np.conj(z) / r2

    def hess(z):
        z = np.asarray(z, dtype=complex)
        nloc = z.size
        r2 = float(np.vdot(z, z).real)
        if r2 < _EPS:
            _check_origin()
            return data.c0 * np.eye(nloc) + data.c1 * np.outer(z, np.conj(z))
        s = np.log(r2)
        up, upp = float(data.up(s)), float(data.upp(s))
        return (up / r2) * np.eye(nloc) + ((upp - up) / r2**2) * np.outer(z, np.conj(z))

    def holo_hess(z):
        z = np.asarray(z, dtype=complex)
        r2 = float(np.vdot(z, z).real)
        if r2 < _EPS:
            _check_origin()
            return data.c1 * np.outer(np.conj(z), np.conj(z))
        s = np.log(r2)
        up, upp = float(data.up(s)), float(data.upp(s))
        return ((upp - up) / r2**2) * np.outer(np.conj(z), np.conj(z))

    return Weight(name=name, phi=phi, grad=grad, hess=hess,
                  holo_hess=holo_hess, radial=data, params=params)


def fubini_study_weight() -> Weight:
    """phi = ln(1 + |zeta|^2), the chart potential of the standard metric on O(1)."""
    data = RadialData(
        u=lambda s: _softplus(s),
        up=lambda s: _sigmoid(s),
        upp=lambda s: _sigmoid(s) * (1.0 - _sigmoid(s)),
        c0=1.0, c1=-1.0,
    )
    return _radial_weight("fs", data)


def log_norm_weight() -> Weight:
    """phi = ln|zeta|^2; curvature concentrates at the origin, zero elsewhere.

    Singular at zeta = 0, which all shipped domains exclude.
    """
    data = RadialData(
        u=lambda s: np.asarray(s, dtype=float),
        up=lambda s: np.ones_like(np.asarray(s, dtype=float)),
        upp=lambda s: np.zeros_like(np.asarray(s, dtype=float)),
    )
    return _radial_weight("ln", data)


def quadratic_weight() -> Weight:
    """phi = |zeta|^2.  Constant-identity Hessian; diagnostic only (not log growth)."""
    data = RadialData(
        u=lambda s: np.exp(np.asarray(s, dtype=float)),
        up=lambda s: np.exp(np.asarray(s, dtype=float)),
        upp=lambda s: np.exp(np.asarray(s, dtype=float)),
        c0=1.0, c1=0.0,
    )
    return _radial_weight("quad", data)


def sampled_radial_weight(s_grid: np.ndarray, u_values: np.ndarray,
                          name: str = "sampled") -> Weight:
    """Custom radial weight from samples of u on a uniform s-grid.

    Cubic-spline derivatives; two-column text files are parsed by
    :func:`load_profile_file`.
    """
    from scipy.interpolate import CubicSpline

    s_grid = np.asarray(s_grid, dtype=float)
    u_values = np.asarray(u_values, dtype=float)
    if s_grid.ndim != 1 or s_grid.size != u_values.size or s_grid.size < 4:
        raise ValueError("need matching 1D arrays with at least 4 samples")
    h = np.diff(s_grid)
    if not np.allclose(h, h[0], rtol=1e-8):
        raise ValueError("s-grid must be uniform")
    spl = CubicSpline(s_grid, u_values, extrapolate=True)
    data = RadialData(u=spl, up=spl.derivative(1), upp=spl.derivative(2))
    return _radial_weight(name, data)


def load_profile_file(path) -> Weight:
    arr = np.loadtxt(path)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"{path}: expected two numeric columns (s, u)")
    return sampled_radial_weight(arr[:, 0], arr[:, 1], name="file")


_REGISTRY = {
    "fs": fubini_study_weight,
    "ln": log_norm_weight,
    "quad": quadratic_weight,
}


def weight_by_name(name: str, params: Optional[dict] = None) -> Weight:
    if name not in _REGISTRY:
        raise KeyError(f"unknown weight {name!r}; have {sorted(_REGISTRY)}")
    return _REGISTRY[name]()
