"""Slope function and the boundary density it weights.

At a boundary point the curvature of the weight and the Levi form of the
boundary are compared on the complex tangent space.  The smallest ratio is
the slope T; sweeping t from 0 to T and integrating the tangent determinant
gives the boundary density used by every limit measure in this package.
"""
from __future__ import annotations

import numpy as np
from scipy import linalg


def tangent_basis(grad: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the complex tangent space {v : sum grad_a v_a = 0}.

    Returns an n x (n-1) matrix with orthonormal columns spanning the
    Euclidean orthogonal complement of conj(grad).
    """
    g = np.asarray(grad, dtype=complex)
    nloc = g.size
    norm = np.linalg.norm(g)
    if norm < 1e-8:
        raise ValueError("vanishing gradient: boundary is not smooth here")
    q, _ = np.linalg.qr(np.column_stack([np.conj(g) / norm, np.eye(nloc)]))
    return q[:, 1:nloc]


def _tangent_pair(weight, domain, sigma):
    sigma = np.asarray(sigma, dtype=complex)
    r = domain.rho(sigma)
    if abs(r) > 1e-10:
        raise ValueError(f"point not on the boundary (rho = {r:.3e})")
    grad = domain.grad_rho(sigma)
    Z = tangent_basis(grad)
    A = Z.conj().T @ weight.hess(sigma) @ Z
    B = -(Z.conj().T @ domain.hess_rho(sigma) @ Z)
    B = 0.5 * (B + B.conj().T)
    A = 0.5 * (A + A.conj().T)
    if np.linalg.eigvalsh(B)[0] <= 1e-12:
        raise ValueError("Levi form not negative definite: domain is not "
                         "pseudoconcave at this point")
    return A, B, grad


def slope_T(weight, domain, sigma) -> float:
    """Minimal tangent eigenvalue of the curvature against the Levi form."""
    A, B, _ = _tangent_pair(weight, domain, sigma)
    t = float(linalg.eigh(A, B, eigvals_only=True)[0])
    return max(t, 0.0)


def mu_density(weight, domain, sigma, *, quad_order: int = 60) -> float:
    """Density of the boundary measure with respect to surface measure.

    (|grad rho|_E / (4 pi^n)) * int_0^T det_tangent(A - t B_levi) dt, where
    B_levi is the (negated) tangent Hessian of rho.  The Euclidean gradient
    length converts the normal-direction form to a surface density; the
    orientation is fixed by nonnegativity.
    """
    A, B, grad = _tangent_pair(weight, domain, sigma)
    T = float(linalg.eigh(A, B, eigvals_only=True)[0])
    if not np.isfinite(T):
        raise ValueError("slope not finite")
    if T <= 0.0:
        return 0.0
    n = np.asarray(sigma).size
    x, w = np.polynomial.legendre.leggauss(quad_order)
    t = 0.5 * T * (x + 1.0)
    wt = 0.5 * T * w
    dets = np.array([np.linalg.det(A - ti * B).real for ti in t])
    val = float(np.sum(wt * dets))
    grad_norm = 2.0 * np.linalg.norm(grad)   # |d rho|_E = 2 |holomorphic gradient|
    return grad_norm * val / (4.0 * np.pi**n)
