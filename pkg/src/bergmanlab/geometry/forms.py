"""(1,1)-forms as raw complex Hessians, with the density convention in one place.

A Hermitian matrix H stands for the form whose top-power density against
Lebesgue measure on C^n is det(H)/pi^n.  All other code keeps bare Hessians
and applies the pi factors only through these helpers.
"""
from __future__ import annotations

import dataclasses

import numpy as np


@dataclasses.dataclass(frozen=True)
class HermitianForm:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("square matrix required")
        asym = np.max(np.abs(m - m.conj().T))
        if asym > 1e-10 * max(1.0, np.max(np.abs(m))):
            raise ValueError(f"matrix not Hermitian (asymmetry {asym:.2e})")
        object.__setattr__(self, "matrix", 0.5 * (m + m.conj().T))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def density(self) -> float:
        """Density of the n-th power / n! against Lebesgue measure."""
        return float(np.linalg.det(self.matrix).real) / np.pi**self.n

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])


def ma_density(weight, point) -> float:
    """det(H_phi)/pi^n at the point: the volume density of the curvature form."""
    H = np.asarray(weight.hess(np.asarray(point, dtype=complex)))
    if not np.all(np.isfinite(H)):
        raise ValueError(f"non-finite Hessian at {point!r}")
    return HermitianForm(H).density()


def omega_density(point, n: int = 2) -> float:
    """Lebesgue density of the reference volume form of the chart.

    Quadrature rules integrate against this measure; dividing a Lebesgue
    density by it converts mass integrals to reference-measure integrands.
    """
    z = np.asarray(point, dtype=complex)
    r2 = float(np.vdot(z, z).real)
    return (1.0 + r2) ** -(n + 1) / np.pi**n
