"""Envelopes, radial equilibrium measures, and their persistence."""
import numpy as np
import pytest

from bergmanlab.equilibrium import (
    CompatibilityError, Envelope, RadialMeasure, RadialProfile,
    compare_measures, geometric_measure, envelope_from_kernel, load_measure,
    load_profile, radial_envelope, radial_monge_ampere, save_measure,
    save_profile)
from bergmanlab.geometry import Weight, domain_by_name, weight_by_name
from property_checks import (envelope_fixed_point_dev,
                             envelope_maximality_overshoot)

FS = weight_by_name("fs")
LN = weight_by_name("ln")
BALL = domain_by_name("ball")
REGION = (0.0, 12.0)


def fs_envelope():
    return radial_envelope(RadialProfile.from_weight(FS), REGION)


def ln_envelope():
    return radial_envelope(RadialProfile.from_weight(LN), REGION)


# ---- profiles ---------------------------------------------------------


def test_profile_validation():
    g = np.linspace(-12, 12, 25)
    with pytest.raises(ValueError, match="matching 1D"):
        RadialProfile(g, np.zeros(24))
    with pytest.raises(ValueError, match="uniform"):
        RadialProfile(np.concatenate([g[:10], g[11:]]), np.zeros(24))
    with pytest.raises(ValueError, match="finite"):
        RadialProfile(g, np.full(25, np.nan))
    with pytest.raises(ValueError, match="span"):
        RadialProfile(np.linspace(-5, 12, 25), np.zeros(25))
    p = RadialProfile(g, g.copy())
    assert p.h == pytest.approx(1.0)
    assert p.end_slopes() == (pytest.approx(1.0), pytest.approx(1.0))


def test_profile_from_weight_needs_radial_data():
    z2 = np.zeros(2, dtype=complex)
    flat = Weight(name="flat", phi=lambda z: 0.0, grad=lambda z: z2,
                  hess=lambda z: np.zeros((2, 2), dtype=complex),
                  holo_hess=lambda z: np.zeros((2, 2), dtype=complex))
    with pytest.raises(ValueError, match="radial"):
        RadialProfile.from_weight(flat)


def test_envelope_container_rejects_bad_profiles():
    g = np.linspace(-12, 12, 101)
    mask = g >= 0
    ok = np.maximum(g, 0.0)
    with pytest.raises(ValueError, match="convex"):
        Envelope(RadialProfile(g, -np.abs(g)), mask, np.full_like(g, 100.0))
    with pytest.raises(ValueError, match="slopes"):
        Envelope(RadialProfile(g, 2.0 * np.maximum(g, 0.0)), mask,
                 np.full_like(g, 100.0))
    with pytest.raises(ValueError, match="constraint"):
        Envelope(RadialProfile(g, ok), mask, ok - 1.0)


# ---- envelope solutions against closed forms --------------------------


def test_envelope_matches_closed_form_smooth_weight():
    # the profile itself is convex with admissible slopes, so the envelope
    # agrees with it on the region and continues flat to the left
    env = fs_envelope()
    g = env.profile.grid
    expect = np.where(g >= 0, FS.radial.u(g), FS.radial.u(0.0))
    assert np.abs(env.profile.values - expect).max() < 1e-12


def test_envelope_matches_closed_form_singular_weight():
    env = ln_envelope()
    g = env.profile.grid
    assert np.abs(env.profile.values - np.maximum(g, 0.0)).max() < 1e-10


@pytest.mark.parametrize("wname", ["fs", "ln"])
def test_envelope_is_fixed_point(wname):
    assert envelope_fixed_point_dev(weight_by_name(wname)) < 1e-12


@pytest.mark.parametrize("wname", ["fs", "ln"])
def test_envelope_maximality(wname):
    # random admissible competitors never exceed the envelope on the region
    assert envelope_maximality_overshoot(weight_by_name(wname),
                                         REGION) < 1e-10


def test_envelope_needs_nodes_in_region():
    with pytest.raises(ValueError, match="no grid nodes"):
        radial_envelope(RadialProfile.from_weight(FS), (100.0, 101.0))


# ---- increment measures -----------------------------------------------


def test_measure_total_telescopes_to_end_slopes():
    for env in (fs_envelope(), ln_envelope()):
        m = radial_monge_ampere(env)
        lo, hi = env.profile.end_slopes()
        assert m.total_mass == pytest.approx((hi ** 2 - lo ** 2) / 2.0,
                                             abs=1e-14)
        # density nodes clip slope noise at zero, so the recount can sit a
        # few 1e-11 above the signed total
        recount = m.atom_mass() + float(np.sum(m.density) * m.h)
        assert recount == pytest.approx(m.total_mass, abs=1e-9)


def test_smooth_weight_measure_has_shell_atom():
    m = radial_monge_ampere(fs_envelope())
    assert len(m.atoms) == 1
    loc, mass = m.atoms[0]
    assert loc == pytest.approx(0.0, abs=1e-12)
    # slope jumps from 0 to u'(0) = 1/2: atom mass near 1/8, off by O(h)
    assert mass == pytest.approx(0.125, abs=2e-3)


def test_singular_weight_measure_is_one_atom():
    m = radial_monge_ampere(ln_envelope())
    assert len(m.atoms) == 1
    loc, mass = m.atoms[0]
    assert loc == pytest.approx(0.0, abs=1e-12)
    assert mass == pytest.approx(0.5, abs=1e-10)
    assert float(np.sum(m.density)) * m.h < 1e-10


def test_geometric_assembly_masses():
    m = geometric_measure(FS, BALL)
    assert m.atoms[0][1] == pytest.approx(0.125, abs=1e-9)
    assert m.total_mass == pytest.approx(0.5, abs=1e-4)
    m2 = geometric_measure(LN, BALL)
    assert m2.atoms[0][1] == pytest.approx(0.5, abs=1e-9)
    assert float(np.sum(m2.density)) * m2.h == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("wname", ["fs", "ln"])
def test_envelope_and_geometric_measures_agree(wname):
    weight = weight_by_name(wname)
    env_m = radial_monge_ampere(
        radial_envelope(RadialProfile.from_weight(weight), REGION))
    geo_m = geometric_measure(weight, BALL)
    comp = compare_measures(env_m, geo_m)
    assert comp.w1 < 1e-3
    assert abs(comp.total_delta) < 1e-3


def test_varying_slope_domain_is_refused():
    with pytest.raises(CompatibilityError) as err:
        geometric_measure(FS, domain_by_name("ellipsoid"))
    assert err.value.spread > 0.1
    assert 0.2 < err.value.t_min < err.value.t_max < 0.7
    assert "spread" in str(err.value)


# ---- measure comparison on hand-built inputs --------------------------


def _atom_only(loc, mass):
    g = np.linspace(-1.0, 1.0, 3)
    return RadialMeasure(grid=g, density=np.zeros(3), atoms=((loc, mass),),
                         total_mass=mass)


def test_compare_identical_measures():
    a = _atom_only(0.0, 0.3)
    comp = compare_measures(a, _atom_only(0.0, 0.3))
    assert comp.w1 == 0.0
    assert comp.total_delta == 0.0
    assert comp.atom_deltas == ((0.0, 0.3, 0.3),)


def test_compare_shifted_atom():
    comp = compare_measures(_atom_only(0.0, 0.3), _atom_only(0.75, 0.3))
    assert comp.w1 == pytest.approx(0.3 * 0.75, abs=1e-15)
    assert len(comp.atom_deltas) == 2


def test_measure_rejects_negative_mass():
    g = np.linspace(-1.0, 1.0, 3)
    with pytest.raises(ValueError, match="density"):
        RadialMeasure(grid=g, density=np.array([0.0, -1.0, 0.0]), atoms=(),
                      total_mass=0.0)
    with pytest.raises(ValueError, match="atom"):
        RadialMeasure(grid=g, density=np.zeros(3), atoms=((0.0, -0.5),),
                      total_mass=-0.5)


# ---- finite-k profiles ------------------------------------------------


def test_kernel_profile_approaches_envelope(get_state):
    states = [get_state("fs", "ball", k) for k in (8, 16)]
    prof, err = envelope_from_kernel(states)
    assert err > 0
    env = fs_envelope()
    dist = np.abs(prof.values - env.profile.values).max()
    # ln k / k scale at k = 16; generous factor keeps this a smoke check
    assert dist < 3.0 * np.log(16) / 16 * 3.0


def test_kernel_profile_needs_two_degrees(get_state):
    with pytest.raises(ValueError, match="two distinct"):
        envelope_from_kernel([get_state("fs", "ball", 8)])


def test_kernel_profile_warns_on_stalled_distances(get_state):
    s8 = get_state("fs", "ball", 8)
    s16 = get_state("fs", "ball", 16)
    with pytest.warns(RuntimeWarning, match="under-resolved"):
        envelope_from_kernel([s8, s8, s16])


def test_kernel_profile_quiet_on_uneven_schedule(get_state, recwarn):
    # distances alternate with the step ratio on this schedule; the
    # rate-normalized constants decrease, so no warning is due
    states = [get_state("ln", "ball", k) for k in (8, 12, 16, 24)]
    envelope_from_kernel(states)
    assert not [w for w in recwarn if w.category is RuntimeWarning]


# ---- persistence ------------------------------------------------------


def test_profile_round_trip(tmp_path):
    env = fs_envelope()
    p = save_profile(env.profile, tmp_path / "prof.csv")
    back = load_profile(p)
    assert np.array_equal(back.grid, env.profile.grid)
    assert np.array_equal(back.values, env.profile.values)


def test_measure_round_trip(tmp_path):
    m = geometric_measure(FS, BALL)
    save_measure(m, tmp_path / "dens.csv", tmp_path / "atoms.csv")
    back = load_measure(tmp_path / "dens.csv", tmp_path / "atoms.csv")
    assert np.array_equal(back.grid, m.grid)
    assert np.array_equal(back.density, m.density)
    assert back.atoms == m.atoms
    assert back.total_mass == pytest.approx(m.total_mass, abs=1e-12)


def test_malformed_table_rejected(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("only,three,columns\n1,2,3\n")
    with pytest.raises(ValueError, match="malformed"):
        load_profile(bad)
