"""Exponential t-moments over [0, T], the 1D engine behind the model kernels.

Every model quantity reduces to I_j(rho, T) = int_0^T t^j e^{t rho} dt with
complex rho.  Two regimes: a power series around rho = 0 (removable
singularity of the antiderivative) and an upward recursion seeded by the
closed antiderivative.  The crossover at |rho T| = 2 keeps both branches at
full double precision; values are returned with an explicit log shift so
large positive Re(rho T) cannot overflow.
"""
from __future__ import annotations

import numpy as np

_SERIES_TERMS = 30


def moment_ladder(rho: complex, T: float, jmax: int):
    """All moments I_j(rho, T), j = 0..jmax, as (shifted values, log shift).

    Returns (vals, shift) with I_j = vals[j] * e^shift and
    shift = max(0, T Re rho), so vals stay O(T^{j+1}) in every regime.
    """
    if T < 0:
        raise ValueError("negative upper limit")
    rho = complex(rho)
    if T == 0:
        return np.zeros(jmax + 1, dtype=complex), 0.0
    x = rho * T
    if abs(x) <= 2.0:
        # I_j = T^{j+1} sum_m x^m / (m! (m + j + 1)); truncation below 1e-18
        m = np.arange(_SERIES_TERMS)
        terms = np.cumprod(np.concatenate([[1.0 + 0j], x / m[1:]]))  # x^m / m!
        j = np.arange(jmax + 1)
        denom = m[None, :] + j[:, None] + 1
        vals = (T ** (j + 1)) * (terms[None, :] / denom).sum(axis=1)
        shift = max(0.0, T * rho.real)
        return vals * np.exp(-shift), shift
    shift = max(0.0, T * rho.real)
    top = np.exp(x - shift)      # e^{rho T - shift}, never overflows
    low = np.exp(-shift)
    vals = np.empty(jmax + 1, dtype=complex)
    vals[0] = (top - low) / rho
    powT = 1.0
    for j in range(1, jmax + 1):
        powT *= T
        vals[j] = (powT * top - j * vals[j - 1]) / rho
    return vals, shift
