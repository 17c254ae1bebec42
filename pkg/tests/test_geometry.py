"""Weights, domains, frames, slope data, and the quadrature layers."""
import numpy as np
import pytest
from scipy import integrate as sint

from bergmanlab.geometry import (
    adapted_frame, ball_exterior, domain_by_name, ellipsoid_exterior,
    integrate_boundary, integrate_interior, integrate_interior_mc,
    integrate_interior_radial, interior_frame, ma_density, mu_density,
    omega_density, sampled_radial_weight, slope_T, weight_by_name)
from property_checks import complex_hessian_fd

FS = weight_by_name("fs")
LN = weight_by_name("ln")
QUAD = weight_by_name("quad")
BALL = domain_by_name("ball")


def sphere_point(rng):
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    return np.array([v[0] + 1j * v[1], v[2] + 1j * v[3]])


# ---- weights ----------------------------------------------------------


@pytest.mark.parametrize("weight", [FS, LN, QUAD], ids=["fs", "ln", "quad"])
def test_profile_derivatives_match_finite_differences(weight):
    s = np.linspace(-6.0, 6.0, 23)
    h = 1e-5
    up_fd = (weight.radial.u(s + h) - weight.radial.u(s - h)) / (2 * h)
    upp_fd = (weight.radial.up(s + h) - weight.radial.up(s - h)) / (2 * h)
    assert np.abs(up_fd - weight.radial.up(s)).max() < 1e-8
    assert np.abs(upp_fd - weight.radial.upp(s)).max() < 1e-8


@pytest.mark.parametrize("weight", [FS, LN, QUAD], ids=["fs", "ln", "quad"])
def test_chart_hessian_matches_profile_hessian(weight):
    # hess is the zbar-z Hessian of phi; check it against central differences
    rng = np.random.default_rng(2)
    for _ in range(4):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        z *= 1.0 + rng.random()          # keep away from the ln singularity
        H_fd = complex_hessian_fd(weight.phi, z, h=3e-4)
        assert np.abs(H_fd - weight.hess(z)).max() < 5e-6


def test_gradient_is_holomorphic_derivative():
    rng = np.random.default_rng(3)
    h = 1e-6
    for weight in (FS, QUAD):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        for a in range(2):
            e = np.zeros(2, dtype=complex)
            e[a] = 1.0
            # d/dz_a = (d/dx - i d/dy)/2 applied to the real scalar phi
            dx = (weight.phi(z + h * e) - weight.phi(z - h * e)) / (2 * h)
            dy = (weight.phi(z + 1j * h * e) - weight.phi(z - 1j * h * e)) / (2 * h)
            assert abs(0.5 * (dx - 1j * dy) - weight.grad(z)[a]) < 1e-8


def test_fs_origin_limits():
    assert np.allclose(FS.hess(np.zeros(2)), np.eye(2))
    assert FS.phi(np.zeros(2)) == pytest.approx(0.0, abs=1e-11)


def test_ln_rejects_origin():
    with pytest.raises(ValueError, match="singular"):
        LN.phi(np.zeros(2))


def test_unknown_weight_name():
    with pytest.raises(KeyError):
        weight_by_name("nope")


def test_sampled_profile_tracks_source():
    s = np.linspace(-12.0, 12.0, 481)
    w = sampled_radial_weight(s, FS.radial.u(s))
    ss = np.linspace(-10.0, 10.0, 57)
    assert np.abs(w.radial.u(ss) - FS.radial.u(ss)).max() < 1e-9
    assert np.abs(w.radial.up(ss) - FS.radial.up(ss)).max() < 1e-6


def test_sampled_profile_rejects_ragged_grid():
    s = np.array([0.0, 1.0, 2.5, 3.0])
    with pytest.raises(ValueError):
        sampled_radial_weight(s, np.zeros(4))


# ---- domains and reference measure ------------------------------------


def test_reference_density_normalization():
    # one over pi^2 at the origin; total chart mass 1/2 by radial reduction
    assert omega_density(np.zeros(2)) == pytest.approx(np.pi ** -2)
    total, _ = sint.quad(lambda r: 2 * np.pi ** 2 * r ** 3 / (1 + r ** 2) ** 3
                         / np.pi ** 2, 0, np.inf)
    assert total == pytest.approx(0.5, abs=1e-12)


def test_region_volume_three_eighths():
    assert integrate_interior(lambda z: 1.0, BALL) == pytest.approx(0.375, abs=1e-12)
    assert integrate_interior_radial(lambda s: np.ones_like(s), BALL) == \
        pytest.approx(0.375, abs=1e-12)


def test_ellipsoid_region_volume_against_direct_quadrature():
    dom = ellipsoid_exterior(2.0)
    got = integrate_interior(lambda z: 1.0, dom)
    inner, _ = sint.dblquad(lambda t2, t1: (1 + t1 + t2) ** -3,
                            0, 1, 0, lambda t1: (1 - t1) / 2.0)
    assert got == pytest.approx(0.5 - inner, abs=1e-10)


def test_monte_carlo_agrees_with_product_rule():
    f = lambda z: float(np.abs(z[0]) ** 2 / (1 + np.vdot(z, z).real))
    ref = integrate_interior(f, BALL)
    val, err = integrate_interior_mc(f, BALL, samples=20000, seed=5)
    assert abs(val - ref) < 5 * err + 1e-4


def test_domain_membership():
    assert BALL.contains([1.2, 0.0])
    assert not BALL.contains([0.5, 0.0])
    assert ball_exterior().rho(np.array([1.0, 0.0])) == pytest.approx(0.0)


def test_boundary_rule_total_is_sphere_area():
    rule = BALL.boundary_rule()
    assert rule.weights.sum() == pytest.approx(2 * np.pi ** 2, rel=1e-12)


def test_defining_function_oracles_consistent():
    rng = np.random.default_rng(9)
    for dom in (BALL, ellipsoid_exterior(2.0)):
        z = sphere_point(rng) * 1.4
        H_fd = complex_hessian_fd(dom.rho, z, h=3e-4)
        assert np.abs(H_fd - dom.hess_rho(z)).max() < 5e-6
        h = 1e-6
        for a in range(2):
            e = np.zeros(2, dtype=complex)
            e[a] = 1.0
            dx = (dom.rho(z + h * e) - dom.rho(z - h * e)) / (2 * h)
            dy = (dom.rho(z + 1j * h * e) - dom.rho(z - 1j * h * e)) / (2 * h)
            assert abs(0.5 * (dx - 1j * dy) - dom.grad_rho(z)[a]) < 1e-8


def test_unknown_domain_name():
    with pytest.raises(KeyError):
        domain_by_name("torus")


# ---- slope and boundary measure ---------------------------------------


def test_slope_constant_on_round_examples():
    rng = np.random.default_rng(0)
    for _ in range(10):
        p = sphere_point(rng)
        assert slope_T(FS, BALL, p) == pytest.approx(0.5, abs=1e-10)
        assert slope_T(LN, BALL, p) == pytest.approx(1.0, abs=1e-10)


def test_slope_spreads_on_ellipsoid():
    dom = ellipsoid_exterior(2.0)
    pole1 = slope_T(FS, dom, np.array([1.0, 0.0]))
    pole2 = slope_T(FS, dom, np.array([0.0, 1.0 / np.sqrt(2.0)]))
    assert abs(pole1 - pole2) > 0.1


def test_slope_independent_of_defining_function():
    # ball vs its affine twin: same region, different rho scaling
    affine = domain_by_name("ball_affine")
    rng = np.random.default_rng(4)
    for _ in range(5):
        p = sphere_point(rng)
        assert slope_T(FS, BALL, p) == pytest.approx(slope_T(FS, affine, p),
                                                     abs=1e-10)
        assert mu_density(FS, BALL, p) == pytest.approx(
            mu_density(FS, affine, p), rel=1e-10)


def test_slope_rejects_off_boundary_points():
    with pytest.raises(ValueError, match="not on the boundary"):
        slope_T(FS, BALL, np.array([1.5, 0.0]))


def test_boundary_masses():
    # constant-slope shell masses of the two round examples
    m_fs = integrate_boundary(lambda p: 1.0, BALL, against="mu", weight=FS)
    m_ln = integrate_boundary(lambda p: 1.0, BALL, against="mu", weight=LN)
    assert m_fs == pytest.approx(0.125, abs=1e-9)
    assert m_ln == pytest.approx(0.5, abs=1e-9)
    with pytest.raises(ValueError):
        integrate_boundary(lambda p: 1.0, BALL, against="mu")


def test_curvature_density_positive_for_fs():
    rng = np.random.default_rng(6)
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    assert ma_density(FS, z) > 0
    # ln curvature vanishes away from its singular point
    assert ma_density(LN, z) == pytest.approx(0.0, abs=1e-13)


# ---- frames -----------------------------------------------------------


def test_interior_frame_diagonalizes_both_forms():
    z0 = np.array([2.0, 0.3 - 0.4j])
    fr = interior_frame(FS, FS, z0)
    L = fr.L
    ref = np.asarray(FS.hess(z0)) / np.pi
    assert np.abs(L.conj().T @ ref @ L - np.eye(2)).max() < 1e-12
    got = L.conj().T @ np.asarray(FS.hess(z0)) @ L
    assert np.abs(got - np.diag(fr.lambdas)).max() < 1e-12


def test_interior_jet_remainder_is_third_order():
    z0 = np.array([2.0, 0.3 - 0.4j])
    fr = interior_frame(FS, FS, z0)
    rng = np.random.default_rng(8)

    def worst(eps):
        errs = []
        for _ in range(6):
            z = eps * (rng.normal(size=2) + 1j * rng.normal(size=2))
            model = 2 * np.real(fr.jet(z)) + (np.conj(z) @ np.diag(fr.lambdas) @ z).real
            errs.append(abs(FS.phi(fr.to_point(z)) - model))
        return max(errs)

    e2, e3 = worst(1e-2), worst(1e-3)
    assert e2 < 1e-3
    assert e3 < 0.01 * e2          # cubic decay, generous factor for the draws


def test_boundary_frame_normal_form():
    sigma = np.array([0.6, 0.8])
    fr = adapted_frame(FS, BALL, sigma)
    assert fr.T == pytest.approx(0.5, abs=1e-12)
    assert fr.grad_norm == pytest.approx(2.0, abs=1e-12)   # unit sphere, log rho
    assert np.all(fr.mu < 0)
    rng = np.random.default_rng(12)

    # tangent ~ eps, normal ~ eps^2: the scaling under which the dropped
    # mixed normal Hessian blocks of the weight are subleading
    def worst(eps):
        r_max = p_max = 0.0
        for _ in range(6):
            z = eps * (rng.normal() + 1j * rng.normal())
            w = eps ** 2 * (rng.normal() + 1j * rng.normal())
            r_max = max(r_max, abs(BALL.rho(fr.to_point([z], w)) - fr.rho0([z], w)))
            phi_model = (2 * np.real(fr.jet([z], w))
                         + float(fr.lam[0, 0].real) * abs(z) ** 2)
            p_max = max(p_max, abs(FS.phi(fr.to_point([z], w)) - phi_model))
        return r_max, p_max

    r1, p1 = worst(1e-1)
    r2, p2 = worst(1e-2)
    assert r1 < 1e-2 and p1 < 1e-2
    assert r2 < 0.01 * r1 + 1e-14
    assert p2 < 0.01 * p1 + 1e-14


def test_boundary_frame_feeds_the_model():
    fr = adapted_frame(FS, BALL, np.array([1.0, 0.0]))
    model = fr.model()
    assert model.T == pytest.approx(fr.T, abs=1e-12)
    assert model.normal_scale == pytest.approx(fr.grad_norm)


def test_frame_rejects_interior_points():
    with pytest.raises(ValueError, match="not on the boundary"):
        adapted_frame(FS, BALL, np.array([2.0, 0.0]))
