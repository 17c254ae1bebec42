"""Adapted holomorphic frames at interior and boundary points.

The boundary frame rotates coordinates so the last one is complex-normal,
diagonalizes the Levi form on the tangent factor, applies a holomorphic
quadratic shear putting the defining function in the normal form
rho = Im w + sum mu_i |z_i|^2 + O(3), and records the holomorphic 2-jet of
the weight used to trivialize kernels near the point.
"""
from __future__ import annotations

import dataclasses

import numpy as np
from scipy import linalg

from .slope import tangent_basis


@dataclasses.dataclass(frozen=True)
class InteriorFrame:
    center: np.ndarray
    L: np.ndarray            # chart = center + L @ frame_coords
    lambdas: np.ndarray      # curvature eigenvalues in the orthonormal frame
    phi0: float
    a: np.ndarray            # gradient jet coefficients, frame coords
    B: np.ndarray            # holomorphic Hessian jet, frame coords

    def to_point(self, z) -> np.ndarray:
        return self.center + self.L @ np.asarray(z, dtype=complex)

    def jet(self, z) -> complex:
        """Holomorphic 2-jet h with phi(to_point(z)) = 2 Re h(z) + z^H diag(lambda) z + O(3)."""
        z = np.asarray(z, dtype=complex)
        return 0.5 * self.phi0 + self.a @ z + 0.5 * (z @ self.B @ z)


def interior_frame(weight, reference_weight, point) -> InteriorFrame:
    """Frame at an interior point, orthonormal for the reference metric.

    The linear map L makes the reference Hessian/pi the identity and
    diagonalizes the weight Hessian to its eigenvalue vector.
    """
    z0 = np.asarray(point, dtype=complex)
    g = np.asarray(reference_weight.hess(z0)) / np.pi
    gw, gU = np.linalg.eigh(g)
    if gw[0] <= 0:
        raise ValueError("reference metric degenerate at the center")
    g_isqrt = gU @ np.diag(gw**-0.5) @ gU.conj().T
    lam, U = np.linalg.eigh(g_isqrt @ np.asarray(weight.hess(z0)) @ g_isqrt)
    L = g_isqrt @ U
    return InteriorFrame(
        center=z0, L=L, lambdas=lam,
        phi0=float(weight.phi(z0)),
        a=L.T @ weight.grad(z0),
        B=L.T @ weight.holo_hess(z0) @ L,
    )


@dataclasses.dataclass(frozen=True)
class BoundaryFrame:
    sigma: np.ndarray
    Z: np.ndarray             # n x (n-1) tangent columns, Levi-diagonalizing
    nu: np.ndarray            # complex normal; rho(sigma + w nu) = Im w + O(w^2)
    mu: np.ndarray            # Levi eigenvalues, all negative
    lam: np.ndarray           # (n-1) x (n-1) tangent Hessian of the weight
    T: float
    grad_norm: float          # Euclidean |d rho| at sigma
    Q_rho: np.ndarray         # holomorphic quadratic of rho in frame coords
    phi0: float
    a: np.ndarray
    B: np.ndarray
    dphi_nu: complex

    @property
    def L(self) -> np.ndarray:
        return np.column_stack([self.Z, self.nu])

    def to_point(self, z, w) -> np.ndarray:
        """Shear map: frame coords (z, w) to the chart."""
        eta = np.append(np.atleast_1d(np.asarray(z, dtype=complex)), complex(w))
        q = 0.5 * (eta @ self.Q_rho @ eta)
        eta2 = eta.copy()
        eta2[-1] = eta[-1] - 2j * q
        return self.sigma + self.L @ eta2

    def rho0(self, z, w) -> float:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return float(np.imag(w) + np.sum(self.mu * np.abs(z) ** 2))

    def jet(self, z, w) -> complex:
        """Holomorphic 2-jet of the weight along the sheared coordinates.

        phi(to_point(z, w)) = 2 Re jet + z^H lam z + O(3).
        """
        eta = np.append(np.atleast_1d(np.asarray(z, dtype=complex)), complex(w))
        q = 0.5 * (eta @ self.Q_rho @ eta)
        return (0.5 * self.phi0 + self.a @ eta + 0.5 * (eta @ self.B @ eta)
                + self.dphi_nu * (-2j * q))

    def model(self):
        """Boundary model data with the surface scale folded in.

        Imported lazily to keep the geometry layer free of model code.
        """
        from ..model_kernels import BoundaryModel
        return BoundaryModel(lam=self.lam, mu=self.mu,
                             normal_scale=self.grad_norm)


def adapted_frame(weight, domain, sigma) -> BoundaryFrame:
    sigma = np.asarray(sigma, dtype=complex)
    r = domain.rho(sigma)
    if abs(r) > 1e-10:
        raise ValueError(f"point not on the boundary (rho = {r:.3e})")
    grad = domain.grad_rho(sigma)
    gnorm = np.linalg.norm(grad)
    if gnorm < 1e-8:
        raise ValueError("vanishing boundary gradient")
    Z0 = tangent_basis(grad)
    H_rho = np.asarray(domain.hess_rho(sigma))
    levi = Z0.conj().T @ H_rho @ Z0
    levi = 0.5 * (levi + levi.conj().T)
    mu, V = np.linalg.eigh(levi)
    if mu[-1] >= -1e-12:
        raise ValueError("Levi form degenerate or of wrong sign: not "
                         "pseudoconcave here")
    Z = Z0 @ V
    lam = Z.conj().T @ np.asarray(weight.hess(sigma)) @ Z
    lam = 0.5 * (lam + lam.conj().T)
    T = float(linalg.eigh(lam, -np.diag(mu), eigvals_only=True)[0])
    # normal scaled so that d/dw rho = 1/(2i): rho(sigma + w nu) = Im w + O(2)
    nu = -0.5j * np.conj(grad) / gnorm**2
    L = np.column_stack([Z, nu])
    Q_rho = L.T @ np.asarray(domain.holo_hess_rho(sigma)) @ L
    return BoundaryFrame(
        sigma=sigma, Z=Z, nu=nu, mu=mu, lam=lam, T=max(T, 0.0),
        grad_norm=2.0 * gnorm,
        Q_rho=Q_rho,
        phi0=float(weight.phi(sigma)),
        a=L.T @ weight.grad(sigma),
        B=L.T @ np.asarray(weight.holo_hess(sigma)) @ L,
        dphi_nu=complex(weight.grad(sigma) @ nu),
    )
