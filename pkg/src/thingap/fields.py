"""Velocity fields: rigid motions and cut-off curl fields u = curl(F * Psi).

The cut-off curl fields coincide with a rigid motion inside the body, vanish
below the wall and are divergence free everywhere.  Gradients are exact;
second derivatives come from central differences of the exact gradient.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
from numpy.polynomial import Polynomial

from .errors import StencilClipped, StepUnderflow
from .geometry import GapGeometry, GapState, region

EPS = np.finfo(float).eps


# ---------------------------------------------------------------------------
# rigid motions
# ---------------------------------------------------------------------------

def skew(w):
    """Matrix W with W @ v = w x v."""
    w1, w2, w3 = w
    return np.array([[0.0, -w3, w2], [w3, 0.0, -w1], [-w2, w1, 0.0]])


@dataclass(frozen=True)
class RigidMotion:
    u_star: np.ndarray = field(default_factory=lambda: np.zeros(3))
    omega: np.ndarray = field(default_factory=lambda: np.zeros(3))
    x_star: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        for name in ("u_star", "omega", "x_star"):
            v = np.array(getattr(self, name), dtype=float).reshape(3)
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @classmethod
    def at_contact(cls, u_p, omega, h):
        """Motion whose velocity at P = (0, 0, h) is u_p."""
        return cls(u_p, omega, (0.0, 0.0, h))

    def velocity(self, x):
        x = np.asarray(x, dtype=float)
        return self.u_star + np.cross(self.omega, x - self.x_star)

    def contact(self, h):
        """Contact decomposition (u_P, u_Ptau, u_P3, omega_tau, omega_3) at P."""
        u_p = self.velocity(np.array([0.0, 0.0, h]))
        u_tau = np.array([u_p[0], u_p[1], 0.0])
        w_tau = np.array([self.omega[0], self.omega[1], 0.0])
        return {"u_P": u_p, "u_Ptau": u_tau, "u_P3": float(u_p[2]),
                "omega_tau": w_tau, "omega_3": float(self.omega[2])}


def eval_rigid(m: RigidMotion, x):
    return m.velocity(x)


# ---------------------------------------------------------------------------
# smooth cut-offs
# ---------------------------------------------------------------------------

def smoothstep_polynomial(q=4):
    """Polynomial S on [0, 1] with S(0)=0, S(1)=1 and q vanishing derivatives
    at both ends (degree 2q + 1)."""
    coef = np.zeros(2 * q + 2)
    for n in range(q + 1):
        coef[q + 1 + n] = comb(q + n, n) * comb(2 * q + 1, q - n) * (-1) ** n
    return Polynomial(coef)


class Smoothstep:
    """phi(t) = S(clip(t, 0, 1)) together with its first two derivatives."""

    def __init__(self, q=4):
        self.q = q
        self.p0 = smoothstep_polynomial(q)
        self.p1 = self.p0.deriv(1)
        self.p2 = self.p0.deriv(2)
        self.p3 = self.p0.deriv(3)

    def __call__(self, t, nder=0):
        t = np.asarray(t, dtype=float)
        tc = np.clip(t, 0.0, 1.0)
        inside = (t > 0.0) & (t < 1.0)
        v = self.p0(tc)
        if nder == 0:
            return v
        out = [v]
        for p in (self.p1, self.p2, self.p3)[:nder]:
            out.append(np.where(inside, p(tc), 0.0))
        return tuple(out)


@dataclass(frozen=True)
class CutoffSpec:
    """Radial cut-off psi1 (1 for r < rho, 0 for r > 2 rho), vertical cut-off
    psi2 (1 below big_h, 0 above 2 big_h), transition phi of order q."""

    rho: float = 0.4
    big_h: float = 0.5
    q: int = 4

    def __post_init__(self):
        if self.rho <= 0 or self.big_h <= 0 or self.q < 1:
            raise ValueError("cutoff radii must be positive and q >= 1")


# ---------------------------------------------------------------------------
# generic field interface
# ---------------------------------------------------------------------------

class VelocityField:
    """Base class. ``velocity(x)`` and ``jacobian(x)`` act on (..., 3) arrays;
    ``jacobian`` returns J[..., i, j] = d u_i / d x_j."""

    geom: GapGeometry | None = None
    state: GapState | None = None
    grad_mode: str = "analytic"
    grad_step: float = 1e-6

    def velocity(self, x):
        raise NotImplementedError

    def jacobian(self, x):
        raise NotImplementedError

    def with_grad_mode(self, mode, step=None):
        import copy
        f = copy.copy(self)
        f.grad_mode = mode
        if step is not None:
            f.grad_step = step
        return f


class RigidField(VelocityField):
    def __init__(self, motion: RigidMotion, geom=None, state=None,
                 grad_mode="analytic", grad_step=1e-6):
        self.motion = motion
        self.geom, self.state = geom, state
        self.grad_mode, self.grad_step = grad_mode, grad_step

    def velocity(self, x):
        x = np.asarray(x, dtype=float)
        return self.motion.u_star + np.cross(self.motion.omega, x - self.motion.x_star)

    def jacobian(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(skew(self.motion.omega), x.shape[:-1] + (3, 3)).copy()


class _StreamFamily:
    """Stream vector F, its Jacobian and curl F with its (constant) Jacobian."""

    def stream(self, x):
        raise NotImplementedError

    def curl(self, x):
        raise NotImplementedError


class _VerticalSpin(_StreamFamily):
    # F = 1/2 (-hdot x2, hdot x1, -omega3 r^2); curl F = (-w x2, w x1, hdot)
    def __init__(self, hdot, omega3):
        self.hdot, self.omega3 = float(hdot), float(omega3)

    def stream(self, x):
        hd, w = self.hdot, self.omega3
        x1, x2 = x[..., 0], x[..., 1]
        F = 0.5 * np.stack([-hd * x2, hd * x1, -w * (x1 * x1 + x2 * x2)], -1)
        J = np.zeros(x.shape[:-1] + (3, 3))
        J[..., 0, 1] = -0.5 * hd
        J[..., 1, 0] = 0.5 * hd
        J[..., 2, 0] = -w * x1
        J[..., 2, 1] = -w * x2
        return F, J

    def curl(self, x):
        hd, w = self.hdot, self.omega3
        c = np.stack([-w * x[..., 1], w * x[..., 0], np.full(x.shape[:-1], hd)], -1)
        Jc = np.array([[0.0, -w, 0.0], [w, 0.0, 0.0], [0.0, 0.0, 0.0]])
        return c, np.broadcast_to(Jc, x.shape[:-1] + (3, 3))

    def rigid(self, h):
        return RigidMotion((0.0, 0.0, self.hdot), (0.0, 0.0, self.omega3), (0.0, 0.0, h))


class _TangentialTumble(_StreamFamily):
    # F = (0, -1/2 omega2 (x1^2 + (x3-h)^2), x2 v1)
    def __init__(self, v1, omega2, h):
        self.v1, self.omega2, self.h = float(v1), float(omega2), float(h)

    def stream(self, x):
        v, w, h = self.v1, self.omega2, self.h
        x1, x2, z = x[..., 0], x[..., 1], x[..., 2] - h
        F = np.stack([np.zeros_like(x1), -0.5 * w * (x1 * x1 + z * z), x2 * v], -1)
        J = np.zeros(x.shape[:-1] + (3, 3))
        J[..., 1, 0] = -w * x1
        J[..., 1, 2] = -w * z
        J[..., 2, 1] = v
        return F, J

    def curl(self, x):
        v, w, h = self.v1, self.omega2, self.h
        c = np.stack([v + w * (x[..., 2] - h), np.zeros(x.shape[:-1]), -w * x[..., 0]], -1)
        Jc = np.array([[0.0, 0.0, w], [0.0, 0.0, 0.0], [-w, 0.0, 0.0]])
        return c, np.broadcast_to(Jc, x.shape[:-1] + (3, 3))

    def rigid(self, h):
        return RigidMotion((self.v1, 0.0, 0.0), (0.0, self.omega2, 0.0), (0.0, 0.0, h))


class CutoffCurlField(VelocityField):
    """u = curl(F Psi) with Psi = phi(xi) psi1(r) psi2(x3), where
    xi = (x3 - g_wall) / (h + g - g_wall) is the scaled gap coordinate."""

    kind = "cutoffCurl"

    def __init__(self, family: _StreamFamily, geom: GapGeometry, state: GapState,
                 cutoff: CutoffSpec = CutoffSpec(), grad_mode="analytic", grad_step=1e-6):
        self.family = family
        self.geom, self.state, self.cutoff = geom, state, cutoff
        self.grad_mode, self.grad_step = grad_mode, grad_step
        self._step = Smoothstep(cutoff.q)

    @property
    def rigid_motion(self):
        return self.family.rigid(self.state.h)

    # Psi with Cartesian gradient and Hessian --------------------------------
    def psi(self, x, order=2):
        x = np.asarray(x, dtype=float)
        geom, h = self.geom, self.state.h
        xp = x[..., :2]
        z = x[..., 2]
        c, cg, cH = geom.cap.evaluate(xp)
        w, wg, wH = geom.wall.evaluate(xp)
        D = h + c - w
        Dg = cg - wg
        DH = cH - wH
        N = z - w
        tau = N / D
        shape = x.shape[:-1]

        # d tau / dx (3-vector) and Hessian
        tg = np.zeros(shape + (3,))
        tg[..., :2] = -wg / D[..., None] - (tau / D)[..., None] * Dg
        tg[..., 2] = 1.0 / D
        tH = np.zeros(shape + (3, 3))
        Dd = D[..., None, None]
        tH[..., :2, :2] = (-wH / Dd
                           + wg[..., :, None] * Dg[..., None, :] / Dd ** 2
                           - tg[..., :2, None] * Dg[..., None, :] / Dd
                           - tau[..., None, None] * DH / Dd
                           + tau[..., None, None] * Dg[..., :, None] * Dg[..., None, :] / Dd ** 2)
        tH[..., :2, 2] = -Dg / (D ** 2)[..., None]
        tH[..., 2, :2] = tH[..., :2, 2]

        S = self._step
        f0, f1, f2 = S(tau, 2)
        A = f0
        Ag = f1[..., None] * tg
        AH = f2[..., None, None] * tg[..., :, None] * tg[..., None, :] + f1[..., None, None] * tH

        # radial cut-off psi1(r) = 1 - S((r - rho)/rho)
        rc = self.cutoff.rho
        r = np.hypot(xp[..., 0], xp[..., 1])
        s0, s1, s2 = S((r - rc) / rc, 2)
        B = 1.0 - s0
        b1 = -s1 / rc
        b2 = -s2 / rc ** 2
        rs = np.where(r > 0, r, 1.0)
        e = np.zeros(shape + (3,))
        e[..., :2] = xp / rs[..., None]
        Bg = b1[..., None] * e
        P2 = np.zeros(shape + (3, 3))
        P2[..., 0, 0] = P2[..., 1, 1] = 1.0
        BH = (b2[..., None, None] * e[..., :, None] * e[..., None, :]
              + (b1 / rs)[..., None, None] * (P2 - e[..., :, None] * e[..., None, :]))

        # vertical cut-off psi2(x3) = 1 - S((x3 - H)/H)
        Hc = self.cutoff.big_h
        v0, v1, v2 = S((z - Hc) / Hc, 2)
        C = 1.0 - v0
        Cg = np.zeros(shape + (3,))
        Cg[..., 2] = -v1 / Hc
        CH = np.zeros(shape + (3, 3))
        CH[..., 2, 2] = -v2 / Hc ** 2

        val = A * B * C
        grad = (Ag * (B * C)[..., None] + Bg * (A * C)[..., None] + Cg * (A * B)[..., None])
        if order < 2:
            return val, grad
        outer = lambda p, q: p[..., :, None] * q[..., None, :]
        hess = (AH * (B * C)[..., None, None] + BH * (A * C)[..., None, None]
                + CH * (A * B)[..., None, None]
                + (outer(Ag, Bg) + outer(Bg, Ag)) * C[..., None, None]
                + (outer(Ag, Cg) + outer(Cg, Ag)) * B[..., None, None]
                + (outer(Bg, Cg) + outer(Cg, Bg)) * A[..., None, None])
        return val, grad, hess

    def velocity(self, x):
        x = np.asarray(x, dtype=float)
        self.geom.check_chart(x[..., :2])
        P, Pg = self.psi(x, order=1)
        F, _ = self.family.stream(x)
        c, _ = self.family.curl(x)
        return P[..., None] * c + np.cross(Pg, F)

    def jacobian(self, x):
        x = np.asarray(x, dtype=float)
        self.geom.check_chart(x[..., :2])
        P, Pg, PH = self.psi(x, order=2)
        F, JF = self.family.stream(x)
        c, Jc = self.family.curl(x)
        J = c[..., :, None] * Pg[..., None, :] + P[..., None, None] * Jc
        # d_j (grad Psi x F)_i = (d_j grad Psi x F)_i + (grad Psi x d_j F)_i
        for j in range(3):
            J[..., :, j] += np.cross(PH[..., :, j], F) + np.cross(Pg, JF[..., :, j])
        return J


def example4(hdot, omega3, geom, state, cutoff=CutoffSpec(), **kw):
    """Vertical approach with spin about the contact normal."""
    f = CutoffCurlField(_VerticalSpin(hdot, omega3), geom, state, cutoff, **kw)
    f.kind = "example4"
    return f


def example4b(v1, omega2, geom, state, cutoff=CutoffSpec(), **kw):
    """Tangential sliding with tumbling about x2."""
    f = CutoffCurlField(_TangentialTumble(v1, omega2, state.h), geom, state, cutoff, **kw)
    f.kind = "example4b"
    return f


def eval_example4(f: CutoffCurlField, x):
    return f.velocity(x)


# ---------------------------------------------------------------------------
# derivatives
# ---------------------------------------------------------------------------

def _check_step(step, x, scale=None):
    if scale is None:
        scale = max(1.0, float(np.max(np.abs(x)))) if np.size(x) else 1.0
    if not np.min(step) >= 64 * EPS * scale:
        raise StepUnderflow(f"step {step:g} below 64 eps * scale")


def fd_jacobian(fun, x, step):
    """Central-difference Jacobian of a vector function on (..., 3) points."""
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(3):
        e = np.zeros(3)
        e[j] = step
        cols.append((fun(x + e) - fun(x - e)) / (2 * step))
    return np.stack(cols, -1)


def gradient(f: VelocityField, x, mode=None, step=None):
    """3x3 velocity gradient J[i, j] = d u_i / d x_j."""
    x = np.asarray(x, dtype=float)
    mode = mode or f.grad_mode
    if mode == "analytic":
        return f.jacobian(x)
    step = f.grad_step if step is None else step
    _check_step(step, x)
    return fd_jacobian(f.velocity, x, step)


def divergence_residual(f: VelocityField, x, step=1e-4):
    x = np.asarray(x, dtype=float)
    _check_step(step, x)
    return np.trace(fd_jacobian(f.velocity, x, step), axis1=-2, axis2=-1)


def _stencil_steps(f, x, step, min_step):
    """Largest step <= ``step`` (halving) whose 6-point stencil stays in the
    same region (wall side / fluid / body) as the centre; NaN if none."""
    x = np.asarray(x, dtype=float)
    s = np.array(np.broadcast_to(np.asarray(step, dtype=float), x.shape[:-1]))
    if f.geom is None:
        return s
    reg = region(f.geom, f.state, x)
    ok = np.zeros(s.shape, dtype=bool)
    for _ in range(64):
        good = np.ones(s.shape, dtype=bool)
        for j in range(3):
            for sign in (1.0, -1.0):
                y = x.copy()
                y[..., j] += sign * s
                good &= region(f.geom, f.state, y) == reg
        ok |= good
        todo = ~ok
        if not np.any(todo):
            break
        s = np.where(todo, 0.5 * s, s)
        if np.all(s[todo] < min_step):
            break
    return np.where(ok & (s >= min_step), s, np.nan)


def hessian(f: VelocityField, x, step=None, min_step=None):
    """Second derivatives H[..., i, j, k] = d^2 u_i / dx_j dx_k by central
    differences of the exact gradient; NaN where the stencil cannot fit."""
    x = np.asarray(x, dtype=float)
    step = f.grad_step if step is None else step
    scale = max(1.0, float(np.max(np.abs(x)))) if x.size else 1.0
    min_step = 64 * EPS * scale if min_step is None else min_step
    _check_step(step, x, scale=min_step / (64 * EPS))
    s = _stencil_steps(f, x, step, min_step)
    bad = np.isnan(s)
    s = np.where(bad, np.max(step), s)
    H = np.empty(x.shape[:-1] + (3, 3, 3))
    for k in range(3):
        y1 = x.copy()
        y2 = x.copy()
        y1[..., k] += s
        y2[..., k] -= s
        H[..., k] = (f.jacobian(y1) - f.jacobian(y2)) / (2 * s)[..., None, None]
    H[bad] = np.nan
    return H


def hessian_norm(f: VelocityField, x, step=None, min_step=None):
    """Frobenius norm over all 27 second partials at a single point or array."""
    H = hessian(f, x, step, min_step)
    out = np.sqrt(np.sum(H * H, axis=(-3, -2, -1)))
    if np.any(np.isnan(out)):
        if np.ndim(out) == 0:
            raise StencilClipped("finite-difference stencil leaves the fluid region")
    return float(out) if np.ndim(out) == 0 else out
