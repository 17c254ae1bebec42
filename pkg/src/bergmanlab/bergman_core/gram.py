"""Gram matrices of weighted polynomial spaces and their factorizations.

Monomials are prescaled by their individual norms before assembly, so the
stored Gram is a correlation-type matrix with unit diagonal.  Torus-invariant
data makes it exactly diagonal, which is the fast path carrying every k = 64
experiment; the honest grid path exists to validate that structure at small k
rather than assume it.
"""
from __future__ import annotations

import dataclasses
import hashlib
import os
import warnings
from math import factorial, lgamma
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import integrate

from .basis import MonomialBasis

CACHE_ENV = "BERGMANLAB_CACHE"


class ResolutionError(RuntimeError):
    pass


class IllConditionedError(RuntimeError):
    pass


@dataclasses.dataclass
class KernelState:
    basis: MonomialBasis
    weight: object
    domain: object
    k: int
    log_scale: np.ndarray        # ln sigma_alpha, the per-monomial norm scales
    gram: np.ndarray             # prescaled Gram, unit diagonal
    chol: np.ndarray             # lower-triangular factor of gram
    cond: float
    quad_id: str
    diagonal: bool

    @property
    def key(self) -> str:
        return (f"{self.weight.key()}|{self.domain.key()}|k={self.k}|"
                f"{self.quad_id}")


def _radial_degree_lognorm(weight, domain, d: int, k: int, n: int = 2) -> float:
    """ln of I(d) = int_{s0}^inf exp((d+n)s - (n+1) ln(1+e^s) - k u(s)) ds."""
    s0 = domain.radial_s0
    u = weight.radial.u

    def logf(s):
        return (d + n) * s - (n + 1) * np.logaddexp(0.0, s) - k * u(s)

    # peak location for the shift that keeps quad in range
    sg = np.linspace(s0, s0 + 60.0, 2001)
    lg = logf(sg)
    shift = float(np.max(lg))
    val, err = integrate.quad(lambda s: np.exp(logf(s) - shift),
                              s0, s0 + 80.0, limit=300, epsabs=1e-14,
                              epsrel=1e-12)
    if not np.isfinite(val) or val <= 0:
        raise ResolutionError(f"radial norm failed at degree {d}")
    return shift + np.log(val)


def _sphere_log_moment(alpha, n: int = 2) -> float:
    """ln of the angular factor prod alpha_i! / (|alpha|+n-1)!."""
    d = sum(alpha)
    return sum(lgamma(a + 1) for a in alpha) - lgamma(d + n)


def _torus_invariant(weight, domain) -> bool:
    return weight.radial_flag and (domain.ellipse_a is not None
                                   or domain.radial_s0 is not None)


def build_gram(weight, domain, k: int, *, method: str = "auto",
               resolution: Optional[int] = None,
               angle_count: Optional[int] = None) -> KernelState:
    """Assemble the weighted Gram matrix and its factorization.

    method:
        "radial"  1D norms per total degree (radial weight on a radial domain)
        "torus"   2D moduli-space norms, diagonal by multi-index
        "grid"    honest product-grid Gram with no symmetry assumption
        "auto"    fastest valid of the above
    """
    basis = MonomialBasis.build(domain.n, k)
    if method == "auto":
        if weight.radial_flag and domain.radial_s0 is not None:
            method = "radial"
        elif _torus_invariant(weight, domain):
            method = "torus"
        else:
            method = "grid"

    if method == "radial":
        if not (weight.radial_flag and domain.radial_s0 is not None):
            raise ValueError("radial path needs a radial weight and domain")
        lognorm_by_degree = np.array(
            [_radial_degree_lognorm(weight, domain, d, k) for d in range(k + 1)])
        log_scale = 0.5 * np.array(
            [_sphere_log_moment(a) + lognorm_by_degree[sum(a)]
             for a in basis.multi_indices])
        gram = np.eye(basis.size)
        quad_id = "radial-quad"
    elif method == "torus":
        if not _torus_invariant(weight, domain):
            raise ValueError("torus path needs torus-invariant data")
        if k > 24:
            raise ResolutionError("quadrature path capped at k = 24; "
                                  "use the radial path for larger k")
        res = resolution or 200
        t, w = domain.t_rule(resolution=res)
        t2, w2 = domain.t_rule(resolution=res + res // 2)
        u = weight.radial.u
        logs = np.log(np.maximum(t.sum(axis=1), 1e-300))
        logs2 = np.log(np.maximum(t2.sum(axis=1), 1e-300))
        ew = w * np.exp(-k * u(logs))
        ew2 = w2 * np.exp(-k * u(logs2))
        diag = np.empty(basis.size)
        for i, a in enumerate(basis.multi_indices):
            va = t[:, 0] ** a[0] * t[:, 1] ** a[1]
            va2 = t2[:, 0] ** a[0] * t2[:, 1] ** a[1]
            g1, g2 = float(va @ ew), float(va2 @ ew2)
            if not np.isfinite(g1) or g1 <= 0:
                raise ResolutionError(f"norm failed at {a}")
            if abs(g1 - g2) > 1e-8 * abs(g2):
                raise ResolutionError(
                    f"quadrature under-resolved at {a}: {g1!r} vs {g2!r}")
            diag[i] = g2
        # angular factor pi^2 per torus is part of the reference measure in
        # t-space already; moduli norms are complete as computed
        log_scale = 0.5 * np.log(diag)
        gram = np.eye(basis.size)
        quad_id = f"torus-{res}"
    elif method == "grid":
        gram, log_scale, quad_id = _grid_gram(weight, domain, basis, k,
                                              resolution or 48,
                                              angle_count or (k + 1))
    else:
        raise ValueError(f"unknown method {method!r}")

    diagonal = method in ("radial", "torus")
    chol, cond = _factor(gram)
    return KernelState(basis=basis, weight=weight, domain=domain, k=k,
                       log_scale=log_scale, gram=gram, chol=chol, cond=cond,
                       quad_id=quad_id, diagonal=diagonal)


def _grid_gram(weight, domain, basis, k, t_res, n_angle):
    """Product-rule Gram over moduli x tori with no diagonality assumption.

    Angle counts of k+1 per torus make the angular sums exact for mode
    differences up to k, so this is a true quadrature of every entry.
    """
    t, wt = domain.t_rule(resolution=t_res)
    th = 2.0 * np.pi * np.arange(n_angle) / n_angle
    u = weight.radial.u if weight.radial_flag else None
    dim = basis.size
    G = np.zeros((dim, dim), dtype=complex)
    alphas = np.array(basis.multi_indices)
    for i1 in range(n_angle):
        for i2 in range(n_angle):
            pts = np.column_stack([np.sqrt(t[:, 0]) * np.exp(1j * th[i1]),
                                   np.sqrt(t[:, 1]) * np.exp(1j * th[i2])])
            if u is not None:
                lw = -k * u(np.log(np.maximum(t.sum(axis=1), 1e-300)))
            else:
                lw = -k * np.array([weight.phi(p) for p in pts])
            V = (pts[:, 0:1] ** alphas[:, 0]) * (pts[:, 1:2] ** alphas[:, 1])
            G += (V * (wt * np.exp(lw))[:, None]).T @ V.conj()
    G /= n_angle**2   # angular averages, exact below the aliasing threshold
    d = np.sqrt(np.maximum(G.diagonal().real, 1e-300))
    R = G / np.outer(d, d)
    return 0.5 * (R + R.conj().T), np.log(d), f"grid-{t_res}x{n_angle}"


def _factor(gram):
    evs = np.linalg.eigvalsh(gram)
    cond = float(evs[-1] / max(evs[0], 1e-300))
    try:
        if evs[0] <= 0:
            raise np.linalg.LinAlgError("nonpositive eigenvalue")
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        floor = 1e-14 * evs[-1]
        warnings.warn(
            f"Gram matrix numerically singular (min eig {evs[0]:.3e}); "
            f"flooring spectrum at {floor:.3e}. Asymptotic quantities from "
            "this state may be corrupted.", RuntimeWarning, stacklevel=2)
        w, V = np.linalg.eigh(gram)
        w = np.maximum(w, floor)
        gram2 = (V * w) @ V.conj().T
        chol = np.linalg.cholesky(gram2)
    return chol, cond


# ---- binary cache -----------------------------------------------------

def cache_dir(explicit: Optional[str] = None) -> Path:
    root = explicit or os.environ.get(CACHE_ENV) or "~/.cache/bergmanlab"
    p = Path(root).expanduser()
    p.mkdir(parents=True, exist_ok=True)
    return p


def save_state(state: KernelState, directory: Optional[str] = None) -> Path:
    h = hashlib.sha256(state.key.encode()).hexdigest()[:24]
    path = cache_dir(directory) / f"state-{h}.npz"
    np.savez(path,
             key=np.frombuffer(state.key.encode(), dtype=np.uint8),
             n=state.basis.n, k=state.k,
             log_scale=state.log_scale, gram=state.gram, chol=state.chol,
             cond=state.cond, diagonal=state.diagonal)
    return path


def load_state(weight, domain, k: int, quad_id: str,
               directory: Optional[str] = None) -> Optional[KernelState]:
    probe = KernelState(basis=MonomialBasis.build(domain.n, k), weight=weight,
                        domain=domain, k=k, log_scale=np.zeros(1),
                        gram=np.eye(1), chol=np.eye(1), cond=1.0,
                        quad_id=quad_id, diagonal=True)
    h = hashlib.sha256(probe.key.encode()).hexdigest()[:24]
    path = cache_dir(directory) / f"state-{h}.npz"
    if not path.exists():
        return None
    z = np.load(path)
    if bytes(z["key"]).decode() != probe.key:
        return None
    return KernelState(basis=probe.basis, weight=weight, domain=domain, k=k,
                       log_scale=z["log_scale"], gram=z["gram"],
                       chol=z["chol"], cond=float(z["cond"]),
                       quad_id=quad_id, diagonal=bool(z["diagonal"]))


def build_or_load(weight, domain, k: int, *, method: str = "auto",
                  directory: Optional[str] = None,
                  use_cache: bool = False) -> KernelState:
    if use_cache:
        for qid in ("radial-quad",):
            st = load_state(weight, domain, k, qid, directory)
            if st is not None:
                return st
    st = build_gram(weight, domain, k, method=method)
    if use_cache:
        save_state(st, directory)
    return st
