"""Closed-form fluxes of rigid motions through the top faces of contact domains.

The closed forms below use only scalar arithmetic; ``verify_flux_identity``
checks each of them against surface quadrature of the rigid velocity, which
gives two independent implementations of the same number.

All fluxes are for the rigid field ``u = u_P + omega x (x - P)`` with
``P = (0, 0, h)`` and are taken over the half footprint
``theta in [gamma, gamma + pi]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cos, pi, sin, sqrt, tan

import numpy as np

from .errors import ChartExceeded, FrameViolation
from .fields import RigidField, RigidMotion
from .geometry import DomainSpec, GapGeometry, GapState, PolynomialC3Profile
from .quadrature import QuadratureConfig, flux


def _vec(v):
    return np.asarray(v, dtype=float).reshape(3)


def flux_top_flat(rho, gamma, u_p, omega, annulus=True):
    """Flux through the flat top over a half disc (or the half annulus
    ``rho/2 < r < rho`` when ``annulus`` is true)."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    u_p, omega = _vec(u_p), _vec(omega)
    tilt = omega[0] * cos(gamma) + omega[1] * sin(gamma)
    if annulus:
        return 3.0 / 8.0 * pi * rho ** 2 * u_p[2] + 7.0 * rho ** 3 / 12.0 * tilt
    return 0.5 * pi * rho ** 2 * u_p[2] + 2.0 / 3.0 * rho ** 3 * tilt


def flux_top_cup(rho, gamma, k, alpha, u_p, omega):
    """Flux through the cup ``x3 = h + k r^(1+alpha)`` over a half disc."""
    if rho <= 0 or k < 0 or not 0 < alpha <= 1:
        raise ValueError("need rho > 0, k >= 0 and alpha in (0, 1]")
    u_p, omega = _vec(u_p), _vec(omega)
    s, c = sin(gamma), cos(gamma)
    slope = 2.0 * k * (1 + alpha) / (2 + alpha) * rho ** (2 + alpha)
    spin = (2.0 / 3.0 + 2.0 * k ** 2 * (alpha + 1) / (2 * alpha + 3) * rho ** (2 * alpha)) * rho ** 3
    return (0.5 * pi * rho ** 2 * u_p[2] + slope * (u_p[0] * s - u_p[1] * c)
            + spin * (omega[0] * c + omega[1] * s))


def flux_top_phi(rho, gamma, phi, u_p, omega, *, tan_phi=None):
    """Flux through the tilted plane with ``tan(phi)`` slope in x2.

    The frame must already be rotated so that ``omega[0] == 0``; use
    :func:`thingap.estimates.align_frame` to get there.
    """
    u_p, omega = _vec(u_p), _vec(omega)
    if omega[0] != 0.0:
        raise FrameViolation("tilted-plane flux needs a frame with omega_1 = 0")
    if tan_phi is None:
        if not abs(phi) < pi / 2:
            raise ValueError("|phi| must be below pi/2")
        t, cphi, sphi = tan(phi), cos(phi), sin(phi)
    else:
        t = float(tan_phi)
        cphi = 1.0 / sqrt(1.0 + t * t)
        sphi = t * cphi
    return (pi * rho ** 2 / (2.0 * cphi) * (u_p[1] * sphi + u_p[2] * cphi)
            + 2.0 / 3.0 * rho ** 3 * sin(gamma) * (omega[1] - omega[2] * t))


# ---------------------------------------------------------------------------
# Taylor moments of a C^3 cap
# ---------------------------------------------------------------------------

def _disc_rule(rho, n_r=24, n_t=48):
    x, w = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * rho * (x + 1)
    wr = 0.5 * rho * w * r
    t = 2 * pi * np.arange(n_t) / n_t  # trapezoid is exact for trig polynomials
    R, T = np.meshgrid(r, t, indexing="ij")
    W = np.outer(wr, np.full(n_t, 2 * pi / n_t))
    pts = np.stack([R * np.cos(T), R * np.sin(T)], -1).reshape(-1, 2)
    return pts, W.ravel()


def taylor_moment_integrals(geom: GapGeometry, rho):
    """Disc moments of a polynomial cap over ``|x'| < rho``.

    Returns ``(I1, I2, I3)`` with ``I1 = int grad g``,
    ``I2 = int (g g_2, -g g_1, x2 g_1 - x1 g_2)`` and ``I3`` identically zero.
    """
    if not isinstance(geom.cap, PolynomialC3Profile):
        raise TypeError("Taylor moments need a polynomial cap")
    if not 0 < rho < geom.sigma0:
        raise ChartExceeded(f"rho={rho} must lie in (0, sigma0={geom.sigma0})")
    pts, w = _disc_rule(rho)
    g, dg, _ = geom.cap.evaluate(pts)
    i1 = np.array([w @ dg[:, 0], w @ dg[:, 1]])
    i2 = np.array([w @ (g * dg[:, 1]), -(w @ (g * dg[:, 0])),
                   w @ (pts[:, 1] * dg[:, 0] - pts[:, 0] * dg[:, 1])])
    return i1, i2, np.zeros(3)


# ---------------------------------------------------------------------------
# verification harness
# ---------------------------------------------------------------------------

@dataclass
class FluxReport:
    family: str
    rho: float
    gamma: float
    closed_form: float
    quadrature: float
    rel_error: float
    error_estimate: float

    def as_row(self):
        return {"family": self.family, "rho": self.rho, "gamma": self.gamma,
                "closedForm": self.closed_form, "quadrature": self.quadrature,
                "relError": self.rel_error}


def _top_patch(dom):
    return dom.boundary_patches()[0]


def verify_flux_identity(which, params, m: RigidMotion, cfg=QuadratureConfig()):
    """Compare a closed-form top flux with quadrature of ``u . n``.

    ``params`` holds ``rho`` and ``gamma`` plus ``k``/``alpha`` (cup),
    ``tan_phi`` (phi), ``annulus`` (flat) and optionally ``h``.
    """
    rho, gamma = float(params["rho"]), float(params.get("gamma", 0.0))
    h = float(params.get("h", 0.01))
    k, alpha = float(params.get("k", 1.0)), float(params.get("alpha", 1.0))
    geom = GapGeometry.power_law(k, alpha, sigma0=2.5 * rho)
    state = GapState(h, max(1.0, 2 * h))
    c = m.contact(h)
    u_p, omega = c["u_P"], m.omega
    if which == "flat":
        annulus = bool(params.get("annulus", True))
        dom = (DomainSpec.shell_half if annulus else DomainSpec.half_cylinder)(
            geom, state, rho, gamma)
        closed = flux_top_flat(rho, gamma, u_p, omega, annulus)
    elif which == "cup":
        dom = DomainSpec.cup_top(geom, state, rho, gamma)
        closed = flux_top_cup(rho, gamma, k, alpha, u_p, omega)
    elif which == "phi":
        t = float(params.get("tan_phi", 0.05))
        closed = flux_top_phi(rho, gamma, None, u_p, omega, tan_phi=t)
        dom = DomainSpec.phi_top(geom, state, rho, gamma, tan_phi=t)
    else:
        raise ValueError(f"unknown flux family {which!r}")
    res = flux(_top_patch(dom), RigidField(m), cfg)
    scale = rho ** 2 * np.abs(u_p).max() + rho ** 3 * np.abs(omega).max()
    floor = 1e-14 * max(scale, np.finfo(float).tiny)
    rel = abs(closed - res.value) / max(abs(closed), floor)
    return FluxReport(which, rho, gamma, float(closed), float(res.value), float(rel),
                      float(res.error_estimate))
