"""Bergman metric forms, volume densities, and the grid sup-norm metric."""
from __future__ import annotations

import dataclasses
from typing import Optional

import numpy as np
from scipy.linalg import solve_triangular

from ..geometry.forms import HermitianForm
from .kernels import monomial_vector

_LOG_TINY = -745.0


def _vectors_with_derivs(state, x):
    """Rows [m, d_1 m, ..., d_n m] of scaled monomials at x, common log scale."""
    x = np.asarray(x, dtype=complex)
    n = state.basis.n
    alphas = np.array(state.basis.multi_indices)
    mag = np.abs(x)
    dead_axis = mag == 0
    # finite stand-in keeps the matmul NaN-free; masked to -inf below
    logmag = np.where(dead_axis, 0.0, np.log(np.maximum(mag, 1e-300)))
    phase = np.where(dead_axis, 0.0 + 0.0j, x / np.maximum(mag, 1e-300))

    def scaled(expo, extra_log):
        logv = expo @ logmag - state.log_scale + extra_log
        dead = np.any((expo > 0) & dead_axis[None, :], axis=1)
        logv = np.where(dead | ~np.isfinite(extra_log), -np.inf, logv)
        ph = np.prod(np.where(expo > 0, phase[None, :], 1.0) **
                     np.where(expo > 0, expo, 0), axis=1)
        return logv, ph

    rows_log, rows_ph = [], []
    lv, pv = scaled(alphas, np.zeros(len(alphas)))
    rows_log.append(lv)
    rows_ph.append(pv)
    for a in range(n):
        e = np.zeros(n, dtype=int)
        e[a] = 1
        expo = alphas - e
        with np.errstate(divide="ignore"):
            extra = np.where(alphas[:, a] >= 1, np.log(np.maximum(alphas[:, a], 1)),
                             -np.inf)
        expo = np.where(alphas[:, a:a + 1] >= 1, expo, 0)
        lv, pv = scaled(expo, extra)
        rows_log.append(lv)
        rows_ph.append(pv)
    c = float(np.max(rows_log[0]))
    V = np.zeros((n + 1, len(alphas)), dtype=complex)
    with np.errstate(under="ignore"):
        for i, (lv, pv) in enumerate(zip(rows_log, rows_ph)):
            amp = np.exp(np.maximum(lv - c, _LOG_TINY))
            amp[~np.isfinite(lv)] = 0.0
            V[i] = amp * pv
    return V, c


def bergman_metric_form(state, x) -> HermitianForm:
    """Complex Hessian of ln K(x, x) from analytic polynomial derivatives.

    H_ab = (K S_ab - v_a conj(v_b)) / K^2 with S the derivative Gram and v
    the mixed kernel gradient; the common log scale cancels in the ratio.
    """
    V, _ = _vectors_with_derivs(state, x)
    y = solve_triangular(state.chol, V.conj().T, lower=True)
    P = V @ solve_triangular(state.chol.conj().T, y, lower=False)
    K = P[0, 0].real
    if K <= 0:
        raise ValueError("kernel diagonal vanishes here; metric undefined")
    # P[i, j] = row_i G^{-1} row_j^*, so S_ab = d_zbar_a d_z_b K = P[b, a]
    # and d_zbar_a K = P[0, a], d_z_b K = P[b, 0]
    H = (K * P[1:, 1:].T - np.outer(P[0, 1:], P[1:, 0])) / K**2
    return HermitianForm(0.5 * (H + H.conj().T))


def bergman_volume_density(state, x) -> float:
    """Density of the n-th power of the k-normalized metric form."""
    H = bergman_metric_form(state, x).matrix / state.k
    return float(np.linalg.det(H).real) / np.pi**state.basis.n


@dataclasses.dataclass
class SupGrid:
    """Discrete point family on a radial domain for sup-norm comparisons.

    s_nodes x latitude x full tori; the torus factor is exact for the
    degrees in play once angle_count exceeds 2k, so only (s, latitude)
    are stored.
    """
    s_nodes: np.ndarray
    chi_count: int = 24
    angle_count: Optional[int] = None
    _cache: dict = dataclasses.field(default_factory=dict)

    @classmethod
    def covering(cls, domain, s_max: float = 40.0, count: int = 120,
                 chi_count: int = 24) -> "SupGrid":
        if domain.radial_s0 is None:
            raise ValueError("sup grids implemented for radial domains")
        return cls(s_nodes=np.linspace(domain.radial_s0, s_max, count),
                   chi_count=chi_count)

    def log_discrete_norms(self, state) -> np.ndarray:
        key = state.key
        if key not in self._cache:
            alphas = np.array(state.basis.multi_indices)
            M = self.angle_count or (2 * state.k + 2)
            m = (np.arange(self.chi_count) + 0.5) / self.chi_count
            u = state.weight.radial.u
            s = self.s_nodes
            # log contributions over the (s, latitude) grid
            la = np.log(1.0 - m)
            lb = np.log(m)
            out = np.empty(len(alphas))
            base = np.outer(s, np.ones(self.chi_count))
            for i, al in enumerate(alphas):
                d = al.sum()
                ll = (d * base + al[0] * la[None, :] + al[1] * lb[None, :]
                      - 2.0 * state.log_scale[i] - state.k * u(s)[:, None])
                mx = ll.max()
                out[i] = mx + np.log(np.exp(ll - mx).sum()) + 2 * np.log(M)
            self._cache[key] = out
        return self._cache[key]


def sup_metric(state, x, grid: SupGrid) -> float:
    """Normalized log of the discrete extremal value at x.

    k^{-1} ln sup {|p(x)|^2 : max over grid of |p|^2 e^{-k phi} <= 1},
    realized through the Christoffel function of the counting measure on
    the grid; nonincreasing under grid refinement.
    """
    if grid.s_nodes.size == 0:
        raise ValueError("empty grid")
    logG = grid.log_discrete_norms(state)
    v, c = monomial_vector(state, x)
    if not np.isfinite(c):
        return -np.inf
    with np.errstate(divide="ignore", under="ignore"):
        terms = 2.0 * np.log(np.maximum(np.abs(v), 1e-300)) - logG
        terms[np.abs(v) == 0] = -np.inf
    mx = float(np.max(terms))
    val = mx + np.log(np.sum(np.exp(np.maximum(terms - mx, _LOG_TINY))))
    return (2.0 * c + val) / state.k
