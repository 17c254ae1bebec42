"""Constant-coefficient model kernels at interior and boundary points.

Interior centers carry a Bargmann-type space with a quadratic weight; the
kernel is an explicit Gaussian.  Boundary centers carry the half-space model
whose Bergman data reduce to one-dimensional exponential moments in the
defining-function direction.  Both evaluators are anti-holomorphic in their
first argument, matching the kernel convention of the finite-k code.

Normalizations are not taken on faith from any single formula: the interior
constant is pinned by the reproducing property, the boundary constant by the
fiber integral against the surface slope density, and the residual
calibration factor is asserted to be 1 in the test suite.
"""
from __future__ import annotations

import dataclasses
from functools import cached_property

import numpy as np
from scipy import integrate, linalg

from .moments import moment_ladder


@dataclasses.dataclass(frozen=True)
class InteriorModel:
    """Curvature eigenvalues of the weight at an interior center."""
    lambdas: np.ndarray

    def __post_init__(self):
        lam = np.atleast_1d(np.asarray(self.lambdas, dtype=float))
        object.__setattr__(self, "lambdas", lam)
        if np.any(lam <= 0):
            raise ValueError("interior model needs positive eigenvalues")

    @classmethod
    def from_frame(cls, frame) -> "InteriorModel":
        return cls(np.asarray(frame.lambdas, dtype=float))

    @property
    def n(self) -> int:
        return len(self.lambdas)


def interior_kernel(model: InteriorModel, z, zp) -> complex:
    """Gaussian model kernel, anti-holomorphic in z, holomorphic in zp."""
    z = np.asarray(z, dtype=complex)
    zp = np.asarray(zp, dtype=complex)
    lam = model.lambdas
    return complex(np.prod(lam / np.pi) * np.exp(np.sum(lam * np.conj(z) * zp)))


def interior_bergman(model: InteriorModel) -> float:
    """Weighted kernel diagonal; constant for the Gaussian model."""
    return float(np.prod(model.lambdas / np.pi))


@dataclasses.dataclass(frozen=True)
class BoundaryModel:
    """Half-space model data at a boundary center.

    lam: tangent Hessian of the weight in the Levi eigenframe.
    mu: negative Levi eigenvalues (same frame, ascending).
    normal_scale: Euclidean length of the defining-function gradient at the
        center; folds the surface-measure normalization into the model so the
        fiber integral reproduces the slope density with constant exactly 1.
    T: extremal slope; validated against (lam, -diag(mu)) if supplied.
    """
    lam: np.ndarray
    mu: np.ndarray
    normal_scale: float = 1.0
    T: float = None

    def __post_init__(self):
        lam = np.atleast_2d(np.asarray(self.lam, dtype=complex))
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        if lam.shape != (len(mu), len(mu)):
            raise ValueError("lam and mu dimensions disagree")
        if np.abs(lam - lam.conj().T).max() > 1e-10 * max(np.abs(lam).max(), 1.0):
            raise ValueError("tangent Hessian must be Hermitian")
        if np.any(linalg.eigvalsh(lam) < -1e-12 * max(np.abs(lam).max(), 1.0)):
            raise ValueError("tangent Hessian must be positive semidefinite")
        if np.any(mu >= 0):
            raise ValueError("Levi eigenvalues must be negative")
        object.__setattr__(self, "lam", 0.5 * (lam + lam.conj().T))
        object.__setattr__(self, "mu", mu)
        Tmin = float(linalg.eigh(self.lam, -np.diag(mu),
                                 eigvals_only=True)[0])
        if self.T is None:
            object.__setattr__(self, "T", Tmin)
        elif abs(self.T - Tmin) > 1e-12 * max(abs(Tmin), 1.0):
            raise ValueError(f"supplied slope {self.T} is not the minimal "
                             f"generalized eigenvalue {Tmin}")
        for t in np.linspace(0.0, self.T, 64):
            if self._det(t) < -1e-12:
                raise ValueError("tangent form loses semidefiniteness "
                                 "before the extremal slope")

    @property
    def n(self) -> int:
        return len(self.mu) + 1

    def _det(self, t: float) -> float:
        return float(np.linalg.det(self.lam + t * np.diag(self.mu)).real)

    @cached_property
    def _poly(self) -> np.ndarray:
        """Ascending coefficients p_j of det(lam + t diag(mu)) in t.

        det(lam + t M) = det(-M) prod_i (T_i - t) over the generalized
        eigenvalues T_i of (lam, -M); exact for any Hermitian pair, no
        commutativity needed, since det(lam + tM) = det(M) det(M^{-1}lam + t).
        """
        Ti = linalg.eigh(self.lam, -np.diag(self.mu), eigvals_only=True)
        detM = float(np.prod(-self.mu))
        m = len(Ti)
        coeff = detM * ((-1.0) ** m) * np.poly(Ti)   # monic in t, descending
        return coeff[::-1].copy()

    @property
    def prefactor(self) -> float:
        return self.normal_scale / (4.0 * np.pi ** self.n)

    def rho0(self, z, w) -> float:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return float(complex(w).imag + np.sum(self.mu * np.abs(z) ** 2))

    def polarized(self, p, q):
        """(rho~, phi~): extensions anti-holomorphic in p, holomorphic in q."""
        z, w = np.atleast_1d(np.asarray(p[0], dtype=complex)), complex(p[1])
        zp, wp = np.atleast_1d(np.asarray(q[0], dtype=complex)), complex(q[1])
        rho = (wp - np.conj(w)) / 2j + np.sum(self.mu * np.conj(z) * zp)
        phi = complex(np.conj(z) @ self.lam @ zp)
        return complex(rho), phi


def boundary_bergman(model: BoundaryModel, z, w) -> float:
    """Weighted model kernel diagonal at the point (z, w)."""
    if model.T <= 0:
        return 0.0
    r0 = model.rho0(z, w)
    shift = max(0.0, model.T * r0)

    def f(t):
        return np.exp(t * r0 - shift) * t * model._det(t)

    val, _ = integrate.quad(f, 0.0, model.T, epsabs=1e-300, epsrel=1e-12,
                            limit=200)
    return model.prefactor * val * np.exp(shift)


def boundary_kernel_integral(model: BoundaryModel, p, q,
                             nodes: int = 200) -> complex:
    """Model kernel via Gauss-Legendre on the slope variable.

    Fixed-order quadrature: the integrand is entire in t, so 200 nodes reach
    well past 1e-10 for every parameter range the experiments touch.
    """
    rho, phi = model.polarized(p, q)
    x, wts = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * model.T * (x + 1.0)
    wt = 0.5 * model.T * wts
    dets = np.array([model._det(ti) for ti in t])
    shift = max(0.0, model.T * rho.real)
    core = np.sum(wt * np.exp(t * rho - shift) * t * dets)
    return complex(model.prefactor * np.exp(phi + shift) * core)


def boundary_kernel_closed(model: BoundaryModel, p, q) -> complex:
    """Model kernel through the moment ladder; equals the integral form.

    t det(lam + t diag mu) = det(-diag mu) t P(t) with P the characteristic
    polynomial of the tangent pair, so the kernel is a finite combination of
    exponential moments; the ladder's series branch covers rho~ near 0.
    """
    rho, phi = model.polarized(p, q)
    pc = model._poly
    vals, shift = moment_ladder(rho, model.T, len(pc))
    core = np.sum(pc * vals[1:])
    return complex(model.prefactor * np.exp(phi + shift) * core)


def _moment_sums(model: BoundaryModel, rho: float, orders=(0, 1, 2)):
    pc = model._poly
    vals, _ = moment_ladder(rho, model.T, len(pc) + max(orders))
    return [complex(np.sum(pc * vals[1 + r:1 + r + len(pc)])).real
            for r in orders]


def slope_profile(model: BoundaryModel, rho: float) -> float:
    """Expected slope t(rho) = d/d rho of ln boundary_bergman; in (0, T)."""
    m0, m1 = _moment_sums(model, float(rho), orders=(0, 1))
    return m1 / m0


def slope_derivative(model: BoundaryModel, rho: float) -> float:
    """dt/d rho, the variance of the slope under the tilted density."""
    m0, m1, m2 = _moment_sums(model, float(rho), orders=(0, 1, 2))
    return m2 / m0 - (m1 / m0) ** 2


def model_metric_form(model: BoundaryModel, rho: float):
    """Curvature form of the model at depth rho on the fiber axis.

    Tangent block lam + t(rho) diag(mu); normal entry t'(rho)/4 from the
    gradient square of the defining function.  Positive definite at every
    finite rho; the normal entry decays down the fiber and the tangent
    determinant collapses as rho -> +infinity.
    """
    from ..geometry.forms import HermitianForm
    t = slope_profile(model, rho)
    tp = slope_derivative(model, rho)
    m = len(model.mu)
    H = np.zeros((m + 1, m + 1), dtype=complex)
    H[:m, :m] = model.lam + t * np.diag(model.mu)
    H[m, m] = 0.25 * tp
    return HermitianForm(H)


def model_volume_density(model: BoundaryModel, rho: float) -> float:
    """Density of the n-th power of the model curvature form."""
    t = slope_profile(model, rho)
    tp = slope_derivative(model, rho)
    return model._det(t) * 0.25 * tp / np.pi ** model.n
