"""Right-hand sides of the near-contact bounds, exponent tables and fits.

Every unknown constant (C_w, C_s, C(K), c0) is set to 1 inside the
evaluators.  What can be tested numerically is the exponent algebra and the
boundedness of lhs/rhs ratios, which :func:`empirical_constant` measures.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import pi, sqrt

import numpy as np

from .errors import (GapExceedsDiameter, InsufficientPoints, LengthMismatch,
                     NonPositiveValue, SigmaOutOfRange, WindowViolation)
from .geometry import DomainSpec, GapGeometry, GapState
from .quadrature import QuadratureConfig, lp_gradient_integral

COMPONENTS_3D = ("u3", "utau", "omtau", "om3")
COMPONENTS_2D = ("un", "utau", "om")


# ---------------------------------------------------------------------------
# exponents
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentTable:
    """Powers of h in the weak bounds at sigma = sigma_h.

    In 2D the entries are read as (normal velocity, tangential velocity,
    rotation) and ``e_om3`` is None.
    """
    alpha: float
    p: float
    dim: int
    e_u3: float
    e_utau: float
    e_omtau: float
    e_om3: float | None = None

    def as_tuple(self):
        vals = (self.e_u3, self.e_utau, self.e_omtau, self.e_om3)
        return vals if self.dim == 3 else vals[:3]

    def __getitem__(self, component):
        names = COMPONENTS_3D if self.dim == 3 else COMPONENTS_2D
        if component not in names:
            raise KeyError(component)
        return self.as_tuple()[names.index(component)]


def weak_exponents(alpha, p, dim=3) -> ExponentTable:
    if not 0 < alpha <= 1 or p < 1:
        raise ValueError("need alpha in (0, 1] and p >= 1")
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    a1 = 1.0 + alpha
    c = 3.0 + alpha if dim == 3 else 2.0 + alpha
    e_n = (1 + 2 * alpha) / (p * a1) * (p - c / (1 + 2 * alpha))
    e_t = 1.0 - c / (p * a1)
    e_w = (2 * alpha * p - c) / (p * a1)
    if dim == 2:
        return ExponentTable(alpha, p, 2, e_n, e_t, e_w)
    return ExponentTable(alpha, p, 3, e_n, e_t, e_w, (alpha * p - c) / (p * a1))


def sigma_powers(alpha, p, dim=3):
    """Negative powers of sigma in the weak bounds, per component."""
    if dim == 3:
        return dict(zip(COMPONENTS_3D, (1 + 2 / p, 1 + alpha + 2 / p, 2 + 2 / p,
                                        2 + alpha + 2 / p)))
    return dict(zip(COMPONENTS_2D, (1 + 1 / p, 1 + alpha + 1 / p, 2 + 1 / p)))


def weak_rhs_sigma(component, sigma, h, k, alpha, p, grad_norm, *, sigma0=None, dim=3):
    """``sigma^-a (h + 3 k sigma^(1+alpha))^(2-1/p) * grad_norm`` with unit constant."""
    powers = sigma_powers(alpha, p, dim)
    if component not in powers:
        raise ValueError(f"unknown component {component!r}")
    if not sigma > 0 or (sigma0 is not None and sigma > sigma0 / 2):
        raise SigmaOutOfRange(f"sigma={sigma} outside (0, sigma0/2]")
    if h < 0:
        raise ValueError("h must be non-negative")
    return sigma ** -powers[component] * (h + 3 * k * sigma ** (1 + alpha)) ** (2 - 1 / p) * grad_norm


def sigma_h(h, alpha, sigma0, big_h, regime="weak"):
    """Cylinder radius matched to the gap."""
    if h > big_h:
        raise GapExceedsDiameter(f"h={h} exceeds H={big_h}")
    if h < 0:
        raise ValueError("h must be non-negative")
    if regime == "weak":
        return 0.5 * sigma0 * (h / big_h) ** (1 / (1 + alpha))
    if regime == "strong":
        return 0.5 * sigma0 * (h / big_h) ** 0.5
    raise ValueError(f"unknown regime {regime!r}")


def combined_bounds(sigma, h, k, alpha, p, grad_norm):
    """Combined bounds on |u_P| and |omega| (tangential and vertical merged)."""
    u = weak_rhs_sigma("utau", sigma, h, k, alpha, p, grad_norm)
    w = weak_rhs_sigma("om3", sigma, h, k, alpha, p, grad_norm)
    return u, w


# ---------------------------------------------------------------------------
# frames
# ---------------------------------------------------------------------------

def rotation_z(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def rotate_frame(vec, angle):
    """Components of ``vec`` in a frame rotated by ``angle`` about x3."""
    return rotation_z(angle) @ np.asarray(vec, dtype=float)


def align_frame(omega):
    """Angle of the frame rotation about x3 that makes ``omega_1 = 0`` and
    ``omega_2 >= 0``."""
    w1, w2 = float(omega[0]), float(omega[1])
    return float(np.arctan2(-w1, w2)) if (w1 or w2) else 0.0


# ---------------------------------------------------------------------------
# fluid-only cylinder comparison
# ---------------------------------------------------------------------------

@dataclass
class ConstantsLedger:
    """Constants of the fluid-only cylinder comparison.

    ``c_w`` defaults to a conservative 10; pass a measured value to get a
    realistic window.
    """
    alpha: float
    k: float
    sigma0: float
    big_h: float
    p: float = 2.0
    c_w: float = 10.0
    c_w_empirical: float | None = None
    c_s_empirical: float | None = None

    @property
    def big_b(self):
        a = self.alpha
        inner = self.big_h * (2 / self.sigma0) ** (1 + a) + 3 * self.k
        return (2 ** (self.p / 2) * 3 * self.k * pi * self.c_w ** self.p
                * inner ** (2 * self.p - 1))

    @property
    def sigma_star(self):
        return min(self.sigma0 / 2, (2 * self.big_b) ** (-1 / (self.alpha * self.p)))

    @property
    def h_star(self):
        a = self.alpha
        return min(self.big_h, (2 / self.sigma0) ** (1 + a)
                   * (2 * self.big_b) ** (-(1 + a) / (a * self.p)) * self.big_h)

    def window(self, h):
        return sigma_h(h, self.alpha, self.sigma0, self.big_h, "weak"), self.sigma_star

    def as_dict(self):
        return {"alpha": self.alpha, "k": self.k, "sigma0": self.sigma0, "H": self.big_h,
                "p": self.p, "C_w": self.c_w, "B": self.big_b,
                "sigmaStar": self.sigma_star, "hStar": self.h_star}


@dataclass
class CylinderReport:
    h: float
    sigma: float
    lhs: float
    rhs_times2: float
    in_window: bool
    passed: bool
    tol: float = 1e-3

    def as_row(self):
        return {"h": self.h, "sigma": self.sigma, "lhs": self.lhs, "rhs": self.rhs_times2,
                "ratio": self.lhs / self.rhs_times2 if self.rhs_times2 else float("inf"),
                "inWindow": self.in_window, "pass": self.passed}


def lemma_cyl_check(f, geom: GapGeometry, state: GapState, sigma, p=2.0,
                    cfg=QuadratureConfig(), *, ledger: ConstantsLedger | None = None,
                    enforce_window=True, tol=1e-3):
    """Compare the full-cylinder gradient integral with twice its fluid part.

    With ``enforce_window`` the radius must lie in ``[sigma_h, sigma_star]``
    computed from ``ledger``; otherwise the window is only reported.
    """
    if ledger is None:
        ledger = ConstantsLedger(geom.alpha, geom.k, geom.sigma0, state.big_h, p)
    lo, hi = ledger.window(state.h)
    in_window = lo * (1 - 1e-12) <= sigma <= hi * (1 + 1e-12)
    if enforce_window and not in_window:
        raise WindowViolation(f"sigma={sigma:.6g} outside [{lo:.6g}, {hi:.6g}]")
    dom = DomainSpec.full_cylinder(geom, state, sigma)
    full = lp_gradient_integral(f, dom, p, cfg, restrict_to_fluid=False).value
    fluid = lp_gradient_integral(f, dom, p, cfg, restrict_to_fluid=True).value
    rhs = 2.0 * fluid
    return CylinderReport(state.h, sigma, full, rhs, bool(in_window), bool(full <= rhs * (1 + tol)), tol)


# ---------------------------------------------------------------------------
# strong bounds
# ---------------------------------------------------------------------------

def strong_rhs_sigma(sigma, h, big_k, hess_norm, u_ptau=0.0, om_tau=0.0, *,
                     radial_symmetric=False, sigma0=None):
    """Second-derivative bound on |u_P3| at radius sigma, unit constants."""
    if not sigma > 0 or (sigma0 is not None and sigma > sigma0 / 2):
        raise SigmaOutOfRange(f"sigma={sigma} outside (0, sigma0/2]")
    thick = h + 2 * big_k * sigma ** 2
    out = 3 / sqrt(pi) * sigma ** -2 * thick ** 2.5 * hess_norm
    if not radial_symmetric:
        out += sigma ** 2 * abs(u_ptau) + sigma * thick * abs(om_tau)
    return out


def strong_rhs_h(h, hess_norm, grad_norm, dim=3):
    if h <= 0:
        raise ValueError("h must be positive")
    if dim == 3:
        return h ** 1.5 * hess_norm + h * grad_norm
    if dim == 2:
        return h ** 1.75 * hess_norm + h ** 1.25 * grad_norm
    raise ValueError("dim must be 2 or 3")


# ---------------------------------------------------------------------------
# fits and ratios
# ---------------------------------------------------------------------------

@dataclass
class ScalingFit:
    points: list = field(repr=False)
    slope: float
    intercept: float
    r_squared: float
    expected_slope: float
    slope_tol: float
    decades: float

    @property
    def passed(self):
        return abs(self.slope - self.expected_slope) <= self.slope_tol

    def as_dict(self):
        return {"slope": self.slope, "intercept": self.intercept, "rSquared": self.r_squared,
                "expectedSlope": self.expected_slope, "slopeTol": self.slope_tol,
                "decades": self.decades, "pass": self.passed}


def fit_scaling(points, expected_slope, slope_tol=0.05) -> ScalingFit:
    """Least squares on (log h, log value)."""
    pts = [(float(h), float(v)) for h, v in points]
    if len(pts) < 4:
        raise InsufficientPoints(f"need at least 4 points, got {len(pts)}")
    h, v = np.array(pts).T
    if np.any(h <= 0) or np.any(v <= 0):
        raise NonPositiveValue("scaling fits need positive h and values")
    x, y = np.log(h), np.log(v)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss if ss > 0 else 1.0
    return ScalingFit(pts, float(slope), float(intercept), float(r2), float(expected_slope),
                      float(slope_tol), float(np.log10(h.max() / h.min())))


def empirical_constant(lhs, rhs):
    """(sup, inf) of lhs/rhs over paired samples."""
    lhs, rhs = np.asarray(lhs, dtype=float), np.asarray(rhs, dtype=float)
    if lhs.shape != rhs.shape:
        raise LengthMismatch(f"{lhs.shape} vs {rhs.shape}")
    if lhs.size == 0:
        raise InsufficientPoints("no samples")
    if np.any(lhs <= 0) or np.any(rhs <= 0):
        raise NonPositiveValue("ratios need positive samples")
    r = lhs / rhs
    return float(r.max()), float(r.min())
