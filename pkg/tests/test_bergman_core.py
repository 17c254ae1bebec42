"""Gram assembly, kernel evaluators, and metric forms.

The structural identities here run against independent quadratures and
finite differences, never against frozen numbers.
"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scipy.linalg import solve_triangular

from bergmanlab.bergman_core import (
    MonomialBasis, ResolutionError, SupGrid, bergman_function,
    bergman_metric_form, bergman_volume_density, build_gram, build_or_load,
    dimension, kernel_eval, load_state, log_kernel_diag, monomial_vector,
    radial_bergman, radial_log_kernel, sup_metric)
from bergmanlab.geometry import domain_by_name, weight_by_name
from property_checks import (diagonality_residual, gram_cross_residual,
                             metric_fd_residual, trace_residual)

FS = weight_by_name("fs")
LN = weight_by_name("ln")
BALL = domain_by_name("ball")


def test_dimension_counts_monomials():
    for k in (0, 1, 5, 24):
        assert dimension(2, k) == (k + 1) * (k + 2) // 2
        assert len(MonomialBasis.build(2, k).multi_indices) == dimension(2, k)


def test_basis_degrees_bounded():
    b = MonomialBasis.build(2, 7)
    assert max(sum(a) for a in b.multi_indices) == 7
    assert min(sum(a) for a in b.multi_indices) == 0


# ---- trace against an independent exterior rule -----------------------


@pytest.mark.parametrize("wname,k", [("fs", 8), ("fs", 16), ("ln", 8),
                                     ("ln", 16), ("quad", 8)])
def test_trace_equals_dimension(get_state, wname, k):
    state = get_state(wname, "ball", k)
    assert trace_residual(state) < 1e-5


def test_trace_holds_for_constants(get_state):
    # k = 0: one section, its normalized square integrates to one
    assert trace_residual(get_state("fs", "ball", 0)) < 1e-12


# ---- cross-validation of the quadrature paths -------------------------


def test_grid_gram_is_torus_diagonal(get_state):
    state = get_state("fs", "ball", 8, method="grid")
    assert diagonality_residual(state) < 1e-12


def test_grid_and_radial_norms_agree(get_state):
    grid_state = get_state("fs", "ball", 8, method="grid")
    radial_state = get_state("fs", "ball", 8, method="radial")
    assert gram_cross_residual(grid_state, radial_state) < 1e-6


def test_torus_and_radial_norms_agree(get_state):
    torus_state = get_state("fs", "ball", 8, method="torus")
    radial_state = get_state("fs", "ball", 8, method="radial")
    assert gram_cross_residual(torus_state, radial_state) < 1e-6


def test_torus_path_refuses_large_k():
    with pytest.raises(ResolutionError, match="capped"):
        build_gram(FS, BALL, 32, method="torus")


def test_unknown_method():
    with pytest.raises(ValueError, match="unknown method"):
        build_gram(FS, BALL, 4, method="magic")


# ---- kernel evaluators ------------------------------------------------


def test_kernel_hermitian_symmetry(get_state):
    state = get_state("fs", "ball", 8)
    rng = np.random.default_rng(1)
    for _ in range(5):
        x = rng.normal(size=2) + 1j * rng.normal(size=2)
        y = rng.normal(size=2) + 1j * rng.normal(size=2)
        assert kernel_eval(state, x, y) == pytest.approx(
            np.conj(kernel_eval(state, y, x)), rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-2.0, 2.0), min_size=8, max_size=8))
def test_kernel_cauchy_schwarz(coords):
    state = build_or_load(FS, BALL, 6, use_cache=True)
    c = np.asarray(coords)
    x = np.array([c[0] + 1j * c[1], c[2] + 1j * c[3]])
    y = np.array([c[4] + 1j * c[5], c[6] + 1j * c[7]])
    lhs = abs(kernel_eval(state, x, y)) ** 2
    rhs = kernel_eval(state, x, x).real * kernel_eval(state, y, y).real
    assert lhs <= rhs * (1 + 1e-10) + 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_weighted_diagonal_is_extremal(seed):
    # B(x) majorizes |p(x)|^2 e^{-k phi} over sections p of unit weighted
    # norm; psi below is the value vector of an orthonormalized basis
    state = build_or_load(FS, BALL, 6, use_cache=True)
    rng = np.random.default_rng(seed)
    dim = state.basis.size
    c = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    c /= np.linalg.norm(c)
    x = rng.normal(size=2) * 1.5 + 1j * rng.normal(size=2)
    v, cc = monomial_vector(state, x)
    psi = solve_triangular(state.chol, np.conj(v), lower=True)
    # sum_i |psi_i|^2 e^{2 cc} recovers the kernel diagonal exactly
    K = kernel_eval(state, x, x).real
    assert np.exp(2 * cc) * float(np.vdot(psi, psi).real) == pytest.approx(
        K, rel=1e-9)
    val = abs(np.sum(c * psi)) ** 2 * np.exp(2 * cc - state.k * FS.phi(x))
    assert val <= bergman_function(state, x) * (1 + 1e-9) + 1e-300


def test_log_kernel_consistency(get_state):
    state = get_state("fs", "ball", 8)
    x = np.array([1.7, 0.4 - 0.9j])
    assert np.exp(log_kernel_diag(state, x)) == pytest.approx(
        kernel_eval(state, x, x).real, rel=1e-11)


def test_radial_slice_matches_general_evaluator(get_state):
    state = get_state("ln", "ball", 12)
    s = np.array([-3.0, 0.0, 1.5, 8.0, 25.0])
    fast = radial_log_kernel(state, s)
    slow = np.array([log_kernel_diag(state, np.array([np.exp(0.5 * si), 0.0]))
                     for si in s])
    assert np.abs(fast - slow).max() < 1e-9
    bf = np.array([bergman_function(state, np.array([np.exp(0.5 * si), 0.0]))
                   for si in s])
    assert np.allclose(radial_bergman(state, s), bf, rtol=1e-9)


def test_radial_slice_needs_diagonal_state(get_state):
    state = get_state("fs", "ball", 8, method="grid")
    with pytest.raises(ValueError, match="diagonal"):
        radial_log_kernel(state, np.array([0.5]))


def test_axis_points_stay_finite(get_state):
    # zero coordinates used to produce NaN through log magnitudes
    state = get_state("fs", "ball", 8)
    for x in (np.array([1.3, 0.0]), np.array([0.0, 2.0]), np.array([1.0, 0.0])):
        assert bergman_function(state, x) > 0
        H = bergman_metric_form(state, x).matrix
        assert np.all(np.isfinite(H))


def test_kernel_huge_radius_no_overflow(get_state):
    state = get_state("fs", "ball", 16)
    x = np.array([np.exp(30.0), 0.0])      # |x|^{2k} overflows doubles
    val = log_kernel_diag(state, x)
    assert np.isfinite(val)


# ---- metric forms -----------------------------------------------------


@pytest.mark.parametrize("wname", ["fs", "ln"])
def test_metric_form_matches_finite_differences(get_state, wname):
    state = get_state(wname, "ball", 8)
    for pt in (np.array([1.3, 0.4 - 0.2j]), np.array([0.9 + 0.9j, -0.7j])):
        assert metric_fd_residual(state, pt) < 1e-5


def test_volume_density_is_metric_determinant(get_state):
    state = get_state("fs", "ball", 8)
    x = np.array([1.5, 0.3j])
    H = bergman_metric_form(state, x).matrix / state.k
    expect = float(np.linalg.det(H).real) / np.pi ** 2
    assert bergman_volume_density(state, x) == pytest.approx(expect, rel=1e-12)


def test_sup_metric_decreases_under_refinement(get_state):
    state = get_state("fs", "ball", 8)
    coarse = SupGrid.covering(BALL, count=30)
    fine = SupGrid.covering(BALL, count=120)
    x = np.array([3.0, 1.0])
    assert sup_metric(state, x, fine) <= sup_metric(state, x, coarse) + 1e-12


# ---- cache ------------------------------------------------------------


def test_cache_round_trip(tmp_path):
    st1 = build_or_load(FS, BALL, 5, directory=str(tmp_path), use_cache=True)
    st2 = build_or_load(FS, BALL, 5, directory=str(tmp_path), use_cache=True)
    assert np.array_equal(st1.gram, st2.gram)
    assert np.array_equal(st1.log_scale, st2.log_scale)
    assert st1.quad_id == st2.quad_id
    assert load_state(FS, BALL, 99, "radial-quad", str(tmp_path)) is None
