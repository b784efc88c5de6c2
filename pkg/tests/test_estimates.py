from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from thingap.errors import (GapExceedsDiameter, InsufficientPoints, LengthMismatch,
                            NonPositiveValue, SigmaOutOfRange, WindowViolation)
from thingap.estimates import (ConstantsLedger, align_frame, empirical_constant, fit_scaling,
                               lemma_cyl_check, combined_bounds, rotate_frame, sigma_h,
                               sigma_powers, strong_rhs_h, strong_rhs_sigma, weak_exponents,
                               weak_rhs_sigma)
from thingap.fields import CutoffSpec, RigidField, RigidMotion, example4
from thingap.geometry import GapGeometry, GapState
from thingap.quadrature import QuadratureConfig

# 0.1^-2 * (0.001 + 3 * 0.1^2)^1.5 evaluated in 30 digits
WEAK_U3_ORACLE = 0.545811322711429283518846073471
STRONG_SIGMA_ORACLE = 0.0108166942825698605341844757802
STRONG_H_2D_ORACLE = 0.0101192885125388138623964593422


def test_exponent_tables_exact():
    assert weak_exponents(1, 2).as_tuple() == (0.5, 0.0, 0.0, -0.5)
    assert weak_exponents(1, 2, dim=2).as_tuple() == (0.75, 0.25, 0.25)
    assert weak_exponents(Fraction(1, 3), 2)["u3"] == 0


def test_exponent_table_lookup():
    t = weak_exponents(0.5, 3)
    assert t["u3"] == t.e_u3
    with pytest.raises(KeyError):
        t["nope"]


def test_weak_rhs_examples():
    assert weak_rhs_sigma("u3", 0.1, 0.001, 1, 1, 2, 1.0) == pytest.approx(WEAK_U3_ORACLE,
                                                                           rel=1e-14)
    assert weak_rhs_sigma("om3", 0.1, 0.001, 1, 1, 2, 0.0) == 0.0
    assert sigma_powers(1, 2)["om3"] == 4


def test_weak_rhs_preconditions():
    with pytest.raises(SigmaOutOfRange):
        weak_rhs_sigma("u3", 0.6, 0.01, 1, 1, 2, 1.0, sigma0=1.0)
    with pytest.raises(SigmaOutOfRange):
        weak_rhs_sigma("u3", 0.0, 0.01, 1, 1, 2, 1.0)
    with pytest.raises(ValueError):
        weak_rhs_sigma("bogus", 0.1, 0.01, 1, 1, 2, 1.0)


def test_sigma_h_examples():
    for regime in ("weak", "strong"):
        assert sigma_h(1.0, 0.5, 0.8, 1.0, regime) == pytest.approx(0.4)
    assert sigma_h(0.01, 1, 0.5, 1, "weak") == pytest.approx(0.025)
    with pytest.raises(GapExceedsDiameter):
        sigma_h(2.0, 1, 1, 1)


@given(h=st.floats(0, 1))
def test_sigma_h_regimes_agree_at_alpha_one(h):
    assert sigma_h(h, 1.0, 1.0, 1.0, "weak") == pytest.approx(sigma_h(h, 1.0, 1.0, 1.0, "strong"))


@given(alpha=st.floats(0.05, 1), p=st.floats(1.0, 8),
       comp=st.sampled_from(["u3", "utau", "omtau", "om3"]))
def test_weak_bound_is_power_law_in_h(alpha, p, comp):
    hs = np.logspace(-6, -1, 6)
    vals = [weak_rhs_sigma(comp, sigma_h(h, alpha, 1.0, 1.0), h, 1.0, alpha, p, 1.0)
            for h in hs]
    fit = fit_scaling(zip(hs, vals), weak_exponents(alpha, p)[comp], 1e-6)
    assert fit.passed


@given(alpha=st.floats(0.05, 1), p=st.floats(1.0, 8), comp=st.sampled_from(["un", "utau", "om"]))
def test_weak_bound_is_power_law_in_h_2d(alpha, p, comp):
    hs = np.logspace(-6, -1, 6)
    vals = [weak_rhs_sigma(comp, sigma_h(h, alpha, 1.0, 1.0), h, 1.0, alpha, p, 1.0, dim=2)
            for h in hs]
    assert fit_scaling(zip(hs, vals), weak_exponents(alpha, p, 2)[comp], 1e-6).passed


@given(alpha=st.floats(0.05, 1), p=st.floats(1.0, 8))
def test_u3_exponent_sign_matches_threshold(alpha, p):
    e = weak_exponents(alpha, p).e_u3
    thr = (3 + alpha) / (1 + 2 * alpha)
    assume(abs(p - thr) > 1e-9)
    assert (e > 0) == (p > thr)


@given(h1=st.floats(0, 0.5), h2=st.floats(0, 0.5), g1=st.floats(0.01, 5), g2=st.floats(0.01, 5),
       comp=st.sampled_from(["u3", "utau", "omtau", "om3"]))
def test_weak_bound_monotone(h1, h2, g1, g2, comp):
    (ha, hb), (ga, gb) = sorted((h1, h2)), sorted((g1, g2))
    assume(hb - ha > 1e-6 and gb - ga > 1e-6)
    f = lambda h, g: weak_rhs_sigma(comp, 0.2, h, 1.0, 0.5, 2.0, g)
    assert f(ha, 1.0) < f(hb, 1.0)
    assert f(0.01, ga) < f(0.01, gb)


@given(sigma=st.floats(0.01, 1), h=st.floats(0, 0.5), alpha=st.floats(0.05, 1),
       p=st.floats(1, 6), g=st.floats(0.01, 5))
def test_combined_bounds_close_componentwise_maxima(sigma, h, alpha, p, g):
    u, w = combined_bounds(sigma, h, 1.0, alpha, p, g)
    comp = {c: weak_rhs_sigma(c, sigma, h, 1.0, alpha, p, g) for c in ("u3", "utau", "omtau", "om3")}
    # for sigma <= 1 the tangential and vertical-spin powers dominate
    assert u >= max(comp["u3"], comp["utau"]) * (1 - 1e-12)
    assert w >= max(comp["omtau"], comp["om3"]) * (1 - 1e-12)
    assert comp["u3"] + comp["utau"] <= 2 * u * (1 + 1e-12)
    assert comp["omtau"] + comp["om3"] <= 2 * w * (1 + 1e-12)


@given(ang=st.floats(-10, 10), u=st.tuples(*[st.floats(-5, 5)] * 3),
       w=st.tuples(*[st.floats(-5, 5)] * 3))
def test_contact_magnitudes_frame_invariant(ang, u, w):
    ur, wr = rotate_frame(u, ang), rotate_frame(w, ang)
    assert np.hypot(*ur[:2]) == pytest.approx(np.hypot(*u[:2]), abs=1e-12)
    assert np.hypot(*wr[:2]) == pytest.approx(np.hypot(*w[:2]), abs=1e-12)
    assert ur[2] == u[2] and wr[2] == w[2]


@given(w=st.tuples(*[st.floats(-5, 5)] * 3))
def test_align_frame_kills_first_spin(w):
    wr = rotate_frame(w, align_frame(w))
    assert abs(wr[0]) <= 1e-12 * (1 + np.abs(w).max())
    assert wr[1] >= -1e-12


def test_strong_examples():
    assert strong_rhs_sigma(0.1, 0.001, 1, 0.0) == 0.0
    assert strong_rhs_sigma(0.1, 0.001, 1, 1.0) == pytest.approx(STRONG_SIGMA_ORACLE, rel=1e-14)
    full = strong_rhs_sigma(0.1, 0.001, 1, 1.0, 2.0, 3.0)
    radial = strong_rhs_sigma(0.1, 0.001, 1, 1.0, 2.0, 3.0, radial_symmetric=True)
    assert radial == pytest.approx(STRONG_SIGMA_ORACLE) and full > radial
    assert strong_rhs_h(0.01, 2, 3) == pytest.approx(0.032)
    assert strong_rhs_h(0.01, 0, 0) == 0
    assert strong_rhs_h(0.01, 2, 3, dim=2) == pytest.approx(STRONG_H_2D_ORACLE, rel=1e-14)
    with pytest.raises(SigmaOutOfRange):
        strong_rhs_sigma(0.3, 0.01, 1, 1.0, sigma0=0.5)


def test_fit_exact_power_law():
    hs = np.logspace(-3, -1, 8)
    fit = fit_scaling([(h, 7 * h ** 0.5) for h in hs], 0.5, 0.05)
    assert fit.slope == pytest.approx(0.5, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.passed and fit.decades == pytest.approx(2.0)
    assert set(fit.as_dict()) >= {"slope", "intercept", "rSquared", "pass"}


def test_fit_perturbed_power_law():
    hs = np.logspace(-3, -1, 8)
    fit = fit_scaling([(h, h ** 0.5 * (1 + 0.01 * np.sin(np.log(h)))) for h in hs], 0.5, 0.02)
    assert fit.passed


def test_fit_preconditions():
    with pytest.raises(InsufficientPoints):
        fit_scaling([(0.1, 1.0)], 0.5)
    with pytest.raises(NonPositiveValue):
        fit_scaling([(0.1, 1.0), (0.2, 0.0), (0.3, 1.0), (0.4, 1.0)], 0.5)


def test_empirical_constant():
    assert empirical_constant([1, 2, 3], [1, 2, 3]) == (1.0, 1.0)
    assert empirical_constant([2, 4], [1, 2]) == (2.0, 2.0)
    with pytest.raises(LengthMismatch):
        empirical_constant([1, 2], [1])
    with pytest.raises(NonPositiveValue):
        empirical_constant([1, -2], [1, 1])
    with pytest.raises(InsufficientPoints):
        empirical_constant([], [])


def test_ledger_constants():
    led = ConstantsLedger(1.0, 1.0, 2.0, 1.0, 2.0, c_w=0.5)
    want_b = 2 * 3 * np.pi * 0.25 * (1.0 + 3.0) ** 3
    assert led.big_b == pytest.approx(want_b)
    assert led.sigma_star == pytest.approx(min(1.0, (2 * want_b) ** -0.5))
    # at h_star the weak radius reaches sigma_star
    assert sigma_h(led.h_star, 1.0, 2.0, 1.0) == pytest.approx(led.sigma_star)
    assert set(led.as_dict()) >= {"B", "sigmaStar", "hStar", "C_w"}


@given(c_w=st.floats(0.01, 20), alpha=st.floats(0.2, 1))
def test_ledger_window_consistent(c_w, alpha):
    led = ConstantsLedger(alpha, 1.0, 2.0, 1.0, 2.0, c_w)
    assert 0 < led.sigma_star <= 1.0
    assert 0 < led.h_star <= 1.0
    lo, hi = led.window(led.h_star)
    assert lo == pytest.approx(hi, rel=1e-9) or led.h_star == 1.0


def test_cylinder_comparison_trivial_without_solid_gradient():
    geom = GapGeometry.power_law(1.0, 1.0, sigma0=2.0)
    state = GapState(1e-3)
    f = RigidField(RigidMotion((0.0, 0.0, 1.0)), geom, state)
    rep = lemma_cyl_check(f, geom, state, 0.02, enforce_window=False)
    assert rep.lhs == 0 and rep.passed


def test_cylinder_comparison_example_field_passes():
    geom = GapGeometry.power_law(1.0, 1.0, sigma0=2.0)
    state = GapState(1e-3)
    sigma = sigma_h(1e-3, 1.0, 2.0, 1.0)
    f = example4(1.0, 0.0, geom, state, CutoffSpec(0.3, 2.0))
    led = ConstantsLedger(1.0, 1.0, 2.0, 1.0, 2.0, c_w=0.1)
    rep = lemma_cyl_check(f, geom, state, sigma, ledger=led, cfg=QuadratureConfig(3, 8, 8, 3, 1, 4))
    assert rep.in_window and rep.passed
    assert rep.as_row()["ratio"] <= 1.0


def test_cylinder_comparison_window_violation():
    geom = GapGeometry.power_law(1.0, 1.0, sigma0=2.0)
    state = GapState(1e-3)
    f = example4(1.0, 0.0, geom, state)
    with pytest.raises(WindowViolation):
        lemma_cyl_check(f, geom, state, 0.9)
