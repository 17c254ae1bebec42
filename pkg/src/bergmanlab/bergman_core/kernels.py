"""Kernel, Bergman function, and log-kernel evaluators.

Monomial vectors are computed per point in split log form (unit-scale complex
vector plus a real log magnitude), so evaluations stay finite across the full
dynamic range needed at k = 64, where raw monomial values overflow doubles.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

_LOG_TINY = -745.0


def monomial_vector(state, x):
    """Scaled monomial values at x: returns (v, c) with m_scaled(x) = e^c v.

    v is normalized to unit max modulus; entries whose log magnitude falls
    more than ~700 nats below the leading one underflow to zero harmlessly.
    """
    x = np.asarray(x, dtype=complex)
    alphas = np.array(state.basis.multi_indices)
    mag = np.abs(x)
    dead_axis = mag == 0
    # finite stand-in keeps the matmul NaN-free; masked to -inf below
    logmag = np.where(dead_axis, 0.0, np.log(np.maximum(mag, 1e-300)))
    phase = np.where(dead_axis, 0.0 + 0.0j, x / np.maximum(mag, 1e-300))
    logv = alphas @ logmag - state.log_scale
    zero_mask = np.any((alphas > 0) & dead_axis[None, :], axis=1)
    logv = np.where(zero_mask, -np.inf, logv)
    c = float(np.max(logv))
    if not np.isfinite(c):
        return np.zeros(len(alphas), dtype=complex), -np.inf
    with np.errstate(under="ignore"):
        amp = np.exp(np.maximum(logv - c, _LOG_TINY))
        amp[~np.isfinite(logv)] = 0.0
    ph = np.prod(np.where(alphas > 0, phase[None, :], 1.0) **
                 np.where(alphas > 0, alphas, 0), axis=1)
    return amp * ph, c


def _gram_solve(state, v):
    # gram^{-1} v through the triangular factor
    y = solve_triangular(state.chol, v, lower=True)
    return solve_triangular(state.chol.conj().T, y, lower=False)


def kernel_eval(state, x, y) -> complex:
    """K(x, y) = sum_i psi_i(x) conj(psi_i(y)) in the chart trivialization."""
    vx, cx = monomial_vector(state, x)
    vy, cy = monomial_vector(state, y)
    if not (np.isfinite(cx) and np.isfinite(cy)):
        return 0.0 + 0.0j
    core = vx @ _gram_solve(state, vy.conj())
    return complex(np.exp(cx + cy) * core)


def log_kernel_diag(state, x) -> float:
    """ln K(x, x); stable for points where K spans hundreds of orders."""
    vx, cx = monomial_vector(state, x)
    if not np.isfinite(cx):
        return -np.inf
    core = float((vx @ _gram_solve(state, vx.conj())).real)
    if core <= 0:
        return -np.inf
    return 2.0 * cx + np.log(core)


def bergman_function(state, x) -> float:
    """B(x) = K(x, x) e^{-k phi(x)}, the weighted kernel diagonal."""
    lk = log_kernel_diag(state, x)
    if lk == -np.inf:
        return 0.0
    return float(np.exp(lk - state.k * state.weight.phi(np.asarray(x, dtype=complex))))


def log_kernel_metric(state, x) -> float:
    """k^{-1} ln K(x, x), the normalized potential of the induced metric."""
    return log_kernel_diag(state, x) / state.k


def radial_log_kernel(state, s_values):
    """Vectorized ln K on the radial slice zeta = (e^{s/2}, 0).

    Valid for diagonal states; collapses the basis by total degree.
    """
    if not state.diagonal:
        raise ValueError("radial evaluation needs a diagonal state")
    s_values = np.atleast_1d(np.asarray(s_values, dtype=float))
    alphas = np.array(state.basis.multi_indices)
    sel = alphas[:, 1] == 0 if state.basis.n == 2 else slice(None)
    degs = alphas[sel][:, 0] if state.basis.n == 2 else alphas[:, 0]
    logM = -2.0 * state.log_scale[sel]
    # on the axis only pure first-coordinate powers survive
    lt = 0.5 * np.outer(s_values, 2 * degs) + logM[None, :]
    m = lt.max(axis=1)
    return m + np.log(np.exp(lt - m[:, None]).sum(axis=1))


def radial_bergman(state, s_values):
    """B on the radial slice, from radial_log_kernel and the radial profile."""
    s_values = np.atleast_1d(np.asarray(s_values, dtype=float))
    u = state.weight.radial.u
    return np.exp(radial_log_kernel(state, s_values) - state.k * u(s_values))
