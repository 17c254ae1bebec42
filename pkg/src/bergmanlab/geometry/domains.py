"""Pseudoconcave regions X = {rho <= 0} in the chart, with quadrature rules.

Shipped domains are exteriors of (ellipsoidal) balls, torus invariant, so the
quadratures come in two layers: a 1D radial rule in s = ln|zeta|^2 for fully
radial integrands, and a 2D rule in t = (|zeta_1|^2, |zeta_2|^2) for torus
invariant ones.  Both integrate against the reference volume form, whose
density in t-space is (1 + t_1 + t_2)^{-(n+1)}.
"""
from __future__ import annotations

import dataclasses
from typing import Callable, Optional

import numpy as np


@dataclasses.dataclass(frozen=True)
class BoundaryRule:
    points: np.ndarray   # (N, n) complex chart points on the boundary
    weights: np.ndarray  # (N,) surface-measure weights


@dataclasses.dataclass(frozen=True)
class Domain:
    name: str
    rho: Callable[[np.ndarray], float]
    grad_rho: Callable[[np.ndarray], np.ndarray]
    hess_rho: Callable[[np.ndarray], np.ndarray]       # H[a,b] = d^2 rho/(dzbar_a dz_b)
    holo_hess_rho: Callable[[np.ndarray], np.ndarray]  # C[a,b] = d^2 rho/(dz_a dz_b)
    n: int = 2
    radial_s0: Optional[float] = None   # X = {s >= s0} when the domain is a ball in s
    ellipse_a: Optional[float] = None   # t_1 + a t_2 >= 1 when ellipsoidal
    params: tuple = ()

    def key(self) -> str:
        ptxt = ",".join(f"{p:.12g}" for p in self.params)
        return f"{self.name}({ptxt})"

    def contains(self, z) -> bool:
        return self.rho(np.asarray(z, dtype=complex)) <= 1e-12

    # ---- boundary rule -------------------------------------------------

    def boundary_rule(self, n_lat: int = 64, n_theta: int = 8) -> BoundaryRule:
        """Product rule on the boundary 3-sphere (n = 2 only).

        For the round sphere the latitude rule is exact for polynomials in
        m = sin^2(chi) up to degree n_lat - 1 and the angle sums are exact
        for Fourier modes below n_theta.
        """
        if self.n != 2:
            raise NotImplementedError("boundary rules implemented for n = 2")
        a = self.ellipse_a if self.ellipse_a is not None else 1.0
        th = 2.0 * np.pi * np.arange(n_theta) / n_theta
        pts, wts = [], []
        if a == 1.0:
            # exact rule: dsigma = (1/2) dm dtheta1 dtheta2, m = sin^2 chi
            m_nodes, m_w = np.polynomial.legendre.leggauss(n_lat)
            m_nodes = 0.5 * (m_nodes + 1.0)
            m_w = 0.5 * m_w
            for m, wm in zip(m_nodes, m_w):
                c, s = np.sqrt(1.0 - m), np.sqrt(m)
                for t1 in th:
                    for t2 in th:
                        pts.append([c * np.exp(1j * t1), s * np.exp(1j * t2)])
                        wts.append(0.5 * wm * (2 * np.pi / n_theta) ** 2)
        else:
            # {|z1|^2 + a |z2|^2 = 1}: chi parametrization with explicit area factor
            x_nodes, x_w = np.polynomial.legendre.leggauss(n_lat)
            chi = 0.25 * np.pi * (x_nodes + 1.0)
            chi_w = 0.25 * np.pi * x_w
            for c, wc in zip(chi, chi_w):
                cos, sin = np.cos(c), np.sin(c)
                area = cos * (sin / np.sqrt(a)) * np.sqrt(sin**2 + cos**2 / a)
                for t1 in th:
                    for t2 in th:
                        pts.append([cos * np.exp(1j * t1),
                                    (sin / np.sqrt(a)) * np.exp(1j * t2)])
                        wts.append(area * wc * (2 * np.pi / n_theta) ** 2)
        return BoundaryRule(points=np.array(pts, dtype=complex),
                            weights=np.array(wts, dtype=float))

    # ---- interior rules ------------------------------------------------

    def radial_rule(self, resolution: int = 400, s_max: float = 40.0):
        """Nodes/weights for int_X f(s) against the radial reference density.

        Density e^{2s}(1+e^s)^{-3} ds on [s0, s_max]; the tail beyond s_max
        is below e^{-s_max} of the total.  Radial domains only.
        """
        if self.radial_s0 is None:
            raise ValueError(f"domain {self.name} has no radial description")
        x, w = np.polynomial.legendre.leggauss(resolution)
        s = self.radial_s0 + 0.5 * (x + 1.0) * (s_max - self.radial_s0)
        ws = 0.5 * (s_max - self.radial_s0) * w
        dens = np.exp(2.0 * s - 3.0 * np.logaddexp(0.0, s))
        return s, ws * dens

    def t_rule(self, resolution: int = 160):
        """2D rule in t-space for torus-invariant integrands over X, n = 2.

        Returns (t nodes (N,2), weights) integrating f(t) against
        (1+t1+t2)^{-3} dt1 dt2 over {t1 + a t2 >= 1, t >= 0}.  Built as the
        full quadrant minus the inner region, each on tensor Gauss grids.
        The u = y/(1-y) map covers the whole quadrant; the mapped density
        stays smooth up to y = 1 because the reference density decays as u^-2.
        """
        if self.n != 2:
            raise NotImplementedError
        a = self.ellipse_a if self.ellipse_a is not None else 1.0
        x, w = np.polynomial.legendre.leggauss(resolution)
        # quadrant: u = t1 + t2 via y in (0,1), v = t1/u
        y = 0.5 * (x + 1.0)
        wy = 0.5 * w
        u = y / (1.0 - y)
        ju = 1.0 / (1.0 - y) ** 2
        v = 0.5 * (x + 1.0)
        wv = 0.5 * w
        U, V = np.meshgrid(u, v, indexing="ij")
        WU, WV = np.meshgrid(wy * ju, wv, indexing="ij")
        t_quad = np.column_stack([(U * V).ravel(), (U * (1 - V)).ravel()])
        w_quad = (WU * WV * U * (1.0 + U) ** -3).ravel()
        # inner region {t1 + a t2 <= 1}: t1 = eta xi, t2 = eta(1-xi)/a, |J| = eta/a
        eta = 0.5 * (x + 1.0)
        weta = 0.5 * w
        E, X = np.meshgrid(eta, eta, indexing="ij")
        WE, WX = np.meshgrid(weta, weta, indexing="ij")
        t1 = E * X
        t2 = E * (1 - X) / a
        t_in = np.column_stack([t1.ravel(), t2.ravel()])
        w_in = (WE * WX * E / a * (1.0 + t1 + t2) ** -3).ravel()
        return (np.vstack([t_quad, t_in]),
                np.concatenate([w_quad, -w_in]))


def _ellipsoid_oracles(a: float):
    D = np.diag([1.0, a])

    def q(z):
        z = np.asarray(z, dtype=complex)
        return float((np.conj(z) @ D @ z).real)

    def rho(z):
        return -np.log(q(z))

    def grad_rho(z):
        z = np.asarray(z, dtype=complex)
        return -(D @ np.conj(z)) / q(z)

    def hess_rho(z):
        z = np.asarray(z, dtype=complex)
        qq = q(z)
        Dz = D @ z
        return -D / qq + np.outer(Dz, np.conj(Dz)) / qq**2

    def holo_hess_rho(z):
        z = np.asarray(z, dtype=complex)
        qq = q(z)
        Dzb = D @ np.conj(z)
        return np.outer(Dzb, Dzb) / qq**2

    return rho, grad_rho, hess_rho, holo_hess_rho


def ball_exterior() -> Domain:
    """X = {|zeta| >= 1} with rho = -ln|zeta|^2."""
    rho, g, h, c = _ellipsoid_oracles(1.0)
    return Domain(name="ball", rho=rho, grad_rho=g, hess_rho=h,
                  holo_hess_rho=c, radial_s0=0.0, ellipse_a=1.0)


def ball_exterior_affine() -> Domain:
    """Same region as ball_exterior but defined by rho = 1 - |zeta|^2.

    Used to check that boundary quantities transform correctly under a
    change of defining function.
    """
    def rho(z):
        z = np.asarray(z, dtype=complex)
        return 1.0 - float(np.vdot(z, z).real)

    def grad_rho(z):
        return -np.conj(np.asarray(z, dtype=complex))

    def hess_rho(z):
        return -np.eye(2, dtype=complex)

    def holo_hess_rho(z):
        return np.zeros((2, 2), dtype=complex)

    return Domain(name="ball_affine", rho=rho, grad_rho=grad_rho,
                  hess_rho=hess_rho, holo_hess_rho=holo_hess_rho,
                  radial_s0=0.0, ellipse_a=1.0)


def ellipsoid_exterior(a: float = 2.0) -> Domain:
    """X = {|zeta_1|^2 + a|zeta_2|^2 >= 1}, rho = -ln(|zeta_1|^2 + a|zeta_2|^2)."""
    if a <= 0:
        raise ValueError("need a > 0")
    rho, g, h, c = _ellipsoid_oracles(a)
    return Domain(name="ellipsoid", rho=rho, grad_rho=g, hess_rho=h,
                  holo_hess_rho=c, radial_s0=None if a != 1.0 else 0.0,
                  ellipse_a=a, params=(a,))


_REGISTRY = {
    "ball": lambda params: ball_exterior(),
    "ball_affine": lambda params: ball_exterior_affine(),
    "ellipsoid": lambda params: ellipsoid_exterior(**(params or {"a": 2.0})),
}


def domain_by_name(name: str, params: Optional[dict] = None) -> Domain:
    if name not in _REGISTRY:
        raise KeyError(f"unknown domain {name!r}; have {sorted(_REGISTRY)}")
    return _REGISTRY[name](params)
