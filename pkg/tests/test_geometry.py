import numpy as np
import pytest
from hypothesis import given, strategies as st

from thingap.errors import ChartExceeded, DegeneratePatch, SigmaOutOfRange
from thingap.geometry import (DomainSpec, GapGeometry, GapState, SurfacePatch, contains_fluid,
                              gap_height, region, surface_param)

GAP_HEIGHT_ORACLE = 0.0223606797749978969640917366873


@pytest.fixture
def unit():
    return GapGeometry.power_law(1.0, 1.0, sigma0=1.0)


def test_gap_height_on_axis(unit):
    assert gap_height(unit, GapState(0.01), [0.0, 0.0]) == pytest.approx(0.01, abs=1e-15)


def test_gap_height_off_axis(unit):
    assert gap_height(unit, GapState(0.01), [0.1, 0.0]) == pytest.approx(0.02, rel=1e-14)


def test_gap_height_fractional_exponent():
    geom = GapGeometry.power_law(2.0, 0.5, sigma0=1.0)
    assert gap_height(geom, GapState(0.0), [0.04, 0.03]) == pytest.approx(GAP_HEIGHT_ORACLE,
                                                                          rel=1e-14)


def test_gap_height_outside_chart(unit):
    with pytest.raises(ChartExceeded):
        gap_height(unit, GapState(0.01), [1.0, 0.0])


@pytest.mark.parametrize("z, expected", [(0.005, True), (0.02, False), (-0.001, False)])
def test_contains_fluid_on_axis(unit, z, expected):
    assert contains_fluid(unit, GapState(0.01), [0.0, 0.0, z]) is expected


def test_region_labels(unit):
    pts = np.array([[0, 0, -1.0], [0, 0, 0.005], [0, 0, 1.0]])
    assert region(unit, GapState(0.01), pts).tolist() == [-1, 0, 1]


def test_gap_state_bounds():
    GapState(0.0, 1.0)
    with pytest.raises(ValueError):
        GapState(-1e-3)
    with pytest.raises(ValueError):
        GapState(1.0, 1.0)


def test_geometry_rejects_bad_parameters():
    with pytest.raises(ValueError):
        GapGeometry.power_law(1.0, 1.5)
    with pytest.raises(ValueError):
        GapGeometry.power_law(-1.0, 1.0)


def test_domain_sigma_range(unit):
    with pytest.raises(SigmaOutOfRange):
        DomainSpec.full_cylinder(unit, GapState(0.01), 0.1, sigma=0.6)
    with pytest.raises(ValueError):
        DomainSpec.full_cylinder(unit, GapState(0.01), 0.3, sigma=0.2)


def test_top_flat_rim_point_and_normal():
    geom = GapGeometry.power_law(1.0, 1.0, sigma0=2.0)
    dom = DomainSpec.half_cylinder(geom, GapState(0.01), 1.0, 0.0)
    pts, nrm, area = surface_param(SurfacePatch("topFlat", dom), 1.0, 0.5)
    np.testing.assert_allclose(pts[:2], [0.0, 1.0], atol=1e-15)
    assert pts[2] == pytest.approx(dom.z_flat_top)
    np.testing.assert_allclose(nrm, [0, 0, 1], atol=1e-15)
    # area element of the (s, t) map: (rb - ra) * pi * r
    assert area == pytest.approx(np.pi)


def test_bottom_normal_points_down(unit):
    dom = DomainSpec.half_cylinder(unit, GapState(0.01), 0.2)
    _, nrm, _ = surface_param(SurfacePatch("bottom", dom), 0.3, 0.7)
    np.testing.assert_allclose(nrm, [0, 0, -1], atol=1e-15)


def test_tilted_top_with_zero_slope_is_flat(unit):
    st_ = GapState(0.01)
    flat = DomainSpec.half_cylinder(unit, st_, 0.3, 0.4)
    tilt = DomainSpec.phi_top(unit, st_, 0.3, 0.4, tan_phi=0.0)
    s, t = np.meshgrid(np.linspace(0, 1, 5), np.linspace(0, 1, 7))
    a = surface_param(SurfacePatch("topFlat", flat), s, t)
    b = surface_param(SurfacePatch("topPhi", tilt), s, t)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)


def test_patch_needs_radius(unit):
    dom = DomainSpec.half_cylinder(unit, GapState(0.01), 0.2)
    with pytest.raises(DegeneratePatch):
        SurfacePatch("lateralCurved", dom)


def test_boundary_patch_inventory(unit):
    st_ = GapState(0.01)
    kinds = lambda d: sorted(p.kind for p in d.boundary_patches())
    assert kinds(DomainSpec.full_cylinder(unit, st_, 0.2)) == ["bottom", "lateralCurved",
                                                               "topFlat"]
    assert kinds(DomainSpec.shell_half(unit, st_, 0.2)) == sorted(
        ["topFlatAnnulus", "bottom", "lateralCurved", "lateralCurved", "lateralFlat",
         "lateralFlat"])


def test_flat_volume_closed_form(unit):
    dom = DomainSpec.full_cylinder(unit, GapState(0.01), 0.2)
    assert dom.volume_exact() == pytest.approx(np.pi * 0.04 * (0.01 + 3 * 0.04))


@pytest.mark.parametrize("geom", [
    GapGeometry.power_law(1.0, 1.0),
    GapGeometry.power_law(2.0, 0.5),
    GapGeometry.polynomial((0.5, 0.1, 0.3), (0.2, -0.1, 0.0, 0.4), sigma0=0.5),
])
def test_profile_invariants(geom):
    assert all(geom.check_invariants().values())


def test_polynomial_cap_radial_flag():
    assert GapGeometry.polynomial((1.0, 0.0, 1.0)).radially_symmetric
    assert not GapGeometry.polynomial((1.0, 0.0, 0.5)).radially_symmetric


@given(r=st.floats(0.0, 0.99), th=st.floats(0, 2 * np.pi), u=st.floats(0.001, 0.999),
       gamma=st.floats(0, 2 * np.pi - 1e-9), alpha=st.sampled_from([1.0, 0.5, 0.3]))
def test_cup_inside_tilted_inside_half_cylinder(r, th, u, gamma, alpha):
    geom = GapGeometry.power_law(1.0, alpha, sigma0=2.0)
    st_ = GapState(0.01)
    rho = 0.5
    cup = DomainSpec.cup_top(geom, st_, rho, gamma)
    tilt = DomainSpec.phi_top(geom, st_, rho, gamma)
    half = DomainSpec.half_cylinder(geom, st_, rho, gamma)
    xp = np.array([r * rho * np.cos(th), r * rho * np.sin(th)])
    zc, _ = cup.top(xp)
    x = np.array([*xp, cup.z_lower + u * (zc - cup.z_lower)])
    if cup.contains(x):
        assert tilt.contains(x)
    if tilt.contains(x):
        assert half.contains(x)


@given(h=st.floats(0.0, 0.5), x1=st.floats(-0.9, 0.9), x2=st.floats(-0.4, 0.4))
def test_gap_height_at_least_h(h, x1, x2):
    geom = GapGeometry.power_law(1.0, 0.5, sigma0=1.0)
    assert gap_height(geom, GapState(h), [x1, x2]) >= h
