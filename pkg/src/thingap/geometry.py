"""Near-contact chart: body and wall profiles, integration domains, patches.

Coordinates follow the contact chart: the origin sits at the wall point Q,
the body point P is at (0, 0, h), the body surface is x3 = h + g(x') and the
wall is x3 = g_wall(x').  All domains are described in polar footprint
coordinates (r, theta) with a variable lower/upper height.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ChartExceeded, DegeneratePatch, SigmaOutOfRange

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

class Profile:
    """A surface height function of x' = (x1, x2) with two derivatives.

    Subclasses implement ``evaluate(xp)`` returning ``(value, grad, hess)`` with
    shapes ``(...)``, ``(..., 2)`` and ``(..., 2, 2)``.
    """

    radial = False

    def evaluate(self, xp):
        raise NotImplementedError

    def value(self, xp):
        return self.evaluate(xp)[0]

    def grad(self, xp):
        return self.evaluate(xp)[1]


@dataclass(frozen=True)
class FlatProfile(Profile):
    radial = True

    def evaluate(self, xp):
        xp = np.asarray(xp, dtype=float)
        shape = xp.shape[:-1]
        return np.zeros(shape), np.zeros(shape + (2,)), np.zeros(shape + (2, 2))


@dataclass(frozen=True)
class PowerLawProfile(Profile):
    """g(x') = k |x'|^(1 + alpha)."""

    k: float
    alpha: float
    radial = True

    def evaluate(self, xp):
        xp = np.asarray(xp, dtype=float)
        k, a = self.k, self.alpha
        r = np.hypot(xp[..., 0], xp[..., 1])
        val = k * r ** (1.0 + a)
        pos = r > 0
        rs = np.where(pos, r, 1.0)
        # r^(alpha-1); at r = 0 the gradient vanishes and the Hessian is
        # 2k*I for alpha = 1, unbounded otherwise (measure-zero set).
        ra = np.where(pos, rs ** (a - 1.0), 1.0 if a == 1.0 else 0.0)
        grad = (k * (1.0 + a) * ra)[..., None] * xp
        unit = xp / rs[..., None]
        eye = np.eye(2)
        outer = unit[..., :, None] * unit[..., None, :]
        hess = (k * (1.0 + a) * ra)[..., None, None] * (eye + (a - 1.0) * outer)
        return val, grad, hess


@dataclass(frozen=True)
class PolynomialC3Profile(Profile):
    """g = a x1^2 + b x1 x2 + c x2^2 + d0 x1^3 + d1 x1^2 x2 + d2 x1 x2^2 + d3 x2^3."""

    quad: tuple = (0.5, 0.0, 0.5)
    cubic: tuple = (0.0, 0.0, 0.0, 0.0)

    @property
    def radial(self):
        a, b, c = self.quad
        return a == c and b == 0 and not any(self.cubic)

    def evaluate(self, xp):
        xp = np.asarray(xp, dtype=float)
        x, y = xp[..., 0], xp[..., 1]
        a, b, c = self.quad
        d0, d1, d2, d3 = self.cubic
        val = (a * x * x + b * x * y + c * y * y
               + d0 * x ** 3 + d1 * x * x * y + d2 * x * y * y + d3 * y ** 3)
        gx = 2 * a * x + b * y + 3 * d0 * x * x + 2 * d1 * x * y + d2 * y * y
        gy = b * x + 2 * c * y + d1 * x * x + 2 * d2 * x * y + 3 * d3 * y * y
        hxx = 2 * a + 6 * d0 * x + 2 * d1 * y
        hxy = b + 2 * d1 * x + 2 * d2 * y
        hyy = 2 * c + 2 * d2 * x + 6 * d3 * y
        grad = np.stack([gx, gy], axis=-1)
        hess = np.stack([np.stack([hxx, hxy], -1), np.stack([hxy, hyy], -1)], -2)
        return val, grad, hess

    def third_derivative_norm(self):
        """Frobenius norm of the (constant) third-derivative tensor."""
        d0, d1, d2, d3 = self.cubic
        # entries: g_111 = 6 d0, g_112 = 2 d1 (x3), g_122 = 2 d2 (x3), g_222 = 6 d3
        return float(np.sqrt(36 * d0 ** 2 + 3 * 4 * d1 ** 2 + 3 * 4 * d2 ** 2 + 36 * d3 ** 2))


# ---------------------------------------------------------------------------
# geometry and gap state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GapGeometry:
    alpha: float = 1.0
    k: float = 1.0
    big_k: float = 1.0
    sigma0: float = 1.0
    cap: Profile = None
    wall: Profile = field(default_factory=FlatProfile)

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.k <= 0 or self.sigma0 <= 0:
            raise ValueError("k and sigma0 must be positive")
        if self.big_k < max(1.0, self.k):
            raise ValueError("K must satisfy K >= max(1, k)")
        if self.cap is None:
            object.__setattr__(self, "cap", PowerLawProfile(self.k, self.alpha))

    @classmethod
    def power_law(cls, k=1.0, alpha=1.0, sigma0=1.0, big_k=None):
        big_k = max(1.0, k) if big_k is None else big_k
        return cls(alpha=alpha, k=k, big_k=big_k, sigma0=sigma0,
                   cap=PowerLawProfile(k, alpha))

    @classmethod
    def polynomial(cls, quad, cubic=(0.0, 0.0, 0.0, 0.0), sigma0=0.5,
                   wall=None, big_k=None):
        cap = PolynomialC3Profile(tuple(quad), tuple(cubic))
        wall = FlatProfile() if wall is None else wall
        # C^{1,1} chart: |g| <= k |x'|^2 with k the largest quadratic bound
        k, K = _polynomial_bounds(cap, sigma0)
        if isinstance(wall, PolynomialC3Profile):
            kw, Kw = _polynomial_bounds(wall, sigma0)
            k, K = max(k, kw), max(K, Kw)
        K = max(K, 1.0, k) if big_k is None else big_k
        return cls(alpha=1.0, k=k, big_k=K, sigma0=sigma0, cap=cap, wall=wall)

    @property
    def radially_symmetric(self):
        return bool(self.cap.radial and self.wall.radial)

    def check_chart(self, xp):
        xp = np.asarray(xp, dtype=float)
        if np.any(np.hypot(xp[..., 0], xp[..., 1]) >= self.sigma0):
            raise ChartExceeded(f"|x'| must stay below sigma0 = {self.sigma0}")

    def check_invariants(self, n=2000, seed=0):
        """Sample the profile bounds; returns a dict of booleans."""
        rng = np.random.default_rng(seed)
        r = self.sigma0 * np.sqrt(rng.uniform(0, 1, n)) * (1 - 1e-9)
        th = rng.uniform(0, TWO_PI, n)
        xp = np.stack([r * np.cos(th), r * np.sin(th)], -1)
        tol = 1e-12
        out = {}
        bound = self.k * r ** (1 + self.alpha)
        for name, prof in (("cap", self.cap), ("wall", self.wall)):
            v, g, H = prof.evaluate(xp)
            v0, g0, _ = prof.evaluate(np.zeros(2))
            out[f"{name}_holder"] = bool(np.all(np.abs(v) <= bound * (1 + tol) + tol))
            out[f"{name}_tangent"] = bool(abs(v0) <= tol and np.all(np.abs(g0) <= tol))
            if isinstance(prof, PolynomialC3Profile):
                K = self.big_k
                ok0 = np.all(np.abs(v) <= K * r ** 2 * (1 + tol))
                ok1 = np.all(np.linalg.norm(g, axis=-1) <= K * r * (1 + tol))
                ok2 = np.all(np.linalg.norm(H, axis=(-2, -1)) <= K * (1 + tol))
                ok3 = prof.third_derivative_norm() <= K * (1 + tol)
                out[f"{name}_c3"] = bool(ok0 and ok1 and ok2 and ok3)
        return out


def _polynomial_bounds(prof, sigma0, n=4001):
    """Sampled constants k (|g| <= k r^2) and K (C^3 bounds) over |x'| < sigma0."""
    th = np.linspace(0, TWO_PI, n)
    unit = np.stack([np.cos(th), np.sin(th)], -1)
    a, b, c = prof.quad
    d0, d1, d2, d3 = prof.cubic
    q = a * unit[:, 0] ** 2 + b * unit[:, 0] * unit[:, 1] + c * unit[:, 1] ** 2
    cub = (d0 * unit[:, 0] ** 3 + d1 * unit[:, 0] ** 2 * unit[:, 1]
           + d2 * unit[:, 0] * unit[:, 1] ** 2 + d3 * unit[:, 1] ** 3)
    # |g|/r^2 = |q + r cub| <= |q| + sigma0 |cub|
    k = float(np.max(np.abs(q) + sigma0 * np.abs(cub))) * 1.01
    xp = sigma0 * unit
    _, g, H = prof.evaluate(xp)
    K1 = float(np.max(np.linalg.norm(g, axis=-1) / sigma0))
    H0 = prof.evaluate(np.zeros(2))[2]
    K2 = float(max(np.max(np.linalg.norm(H, axis=(-2, -1))), np.linalg.norm(H0)))
    K = max(k, K1, K2, prof.third_derivative_norm()) * 1.01
    return max(k, 1e-12), K


@dataclass(frozen=True)
class GapState:
    h: float
    big_h: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.h < self.big_h):
            raise ValueError(f"need 0 <= h < H, got h={self.h}, H={self.big_h}")

    @property
    def contact_point(self):
        return np.array([0.0, 0.0, self.h])


def gap_height(geom: GapGeometry, state: GapState, xp):
    """Vertical fluid thickness h + g(x') - g_wall(x') at planar point(s) x'."""
    xp = np.asarray(xp, dtype=float)
    geom.check_chart(xp)
    return state.h + geom.cap.value(xp) - geom.wall.value(xp)


def region(geom: GapGeometry, state: GapState, x):
    """-1 below the wall, 0 in the fluid, +1 inside the body (vectorised)."""
    x = np.asarray(x, dtype=float)
    xp = x[..., :2]
    z = x[..., 2]
    lo = geom.wall.value(xp)
    hi = state.h + geom.cap.value(xp)
    return np.where(z <= lo, -1, np.where(z >= hi, 1, 0))


def contains_fluid(geom: GapGeometry, state: GapState, x):
    x = np.asarray(x, dtype=float)
    geom.check_chart(x[..., :2])
    out = region(geom, state, x) == 0
    return bool(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# domains
# ---------------------------------------------------------------------------

DOMAIN_KINDS = ("fullCylinder", "halfCylinder", "shellHalf", "cupTop", "phiTop")


@dataclass(frozen=True)
class DomainSpec:
    """One of the cylinder-type subdomains of the contact chart.

    The lower face is x3 = -k sigma^(1+alpha); the upper face depends on the
    kind: flat at h + 2 k sigma^(1+alpha), the cup x3 = h + k r^(1+alpha), or the
    tilted plane x3 = h + 2 k sigma^(1+alpha) - (x2 + sigma) tan(phi).
    """

    kind: str
    geom: GapGeometry
    state: GapState
    rho: float
    sigma: float
    gamma: float = 0.0
    tan_phi: float = 0.0

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if not (0.0 < self.sigma <= self.geom.sigma0 / 2 * (1 + 1e-12)):
            raise SigmaOutOfRange(
                f"sigma={self.sigma} outside (0, sigma0/2 = {self.geom.sigma0 / 2}]")
        if not (0.0 < self.rho <= self.sigma * (1 + 1e-12)):
            raise ValueError(f"need 0 < rho <= sigma, got rho={self.rho}")
        if not 0.0 <= self.gamma < TWO_PI:
            raise ValueError("gamma must lie in [0, 2*pi)")

    # builders -------------------------------------------------------------
    @classmethod
    def full_cylinder(cls, geom, state, rho, sigma=None):
        return cls("fullCylinder", geom, state, rho, rho if sigma is None else sigma)

    @classmethod
    def half_cylinder(cls, geom, state, rho, gamma=0.0, sigma=None):
        return cls("halfCylinder", geom, state, rho, rho if sigma is None else sigma,
                   gamma % TWO_PI)

    @classmethod
    def shell_half(cls, geom, state, rho, gamma=0.0, sigma=None):
        return cls("shellHalf", geom, state, rho, rho if sigma is None else sigma,
                   gamma % TWO_PI)

    @classmethod
    def cup_top(cls, geom, state, rho, gamma=0.0, sigma=None):
        return cls("cupTop", geom, state, rho, rho if sigma is None else sigma,
                   gamma % TWO_PI)

    @classmethod
    def phi_top(cls, geom, state, rho, gamma=0.0, sigma=None, tan_phi=None):
        sigma = rho if sigma is None else sigma
        if tan_phi is None:
            tan_phi = 0.5 * geom.k * sigma ** geom.alpha
        return cls("phiTop", geom, state, rho, sigma, gamma % TWO_PI, float(tan_phi))

    # shape ---------------------------------------------------------------
    @property
    def bump(self):
        return self.geom.k * self.sigma ** (1.0 + self.geom.alpha)

    @property
    def z_lower(self):
        return -self.bump

    @property
    def z_flat_top(self):
        return self.state.h + 2.0 * self.bump

    @property
    def footprint(self):
        """(r_inner, r_outer, theta_start, theta_span)."""
        r0 = self.rho / 2 if self.kind == "shellHalf" else 0.0
        if self.kind == "fullCylinder":
            return 0.0, self.rho, 0.0, TWO_PI
        return r0, self.rho, self.gamma, np.pi

    def top(self, xp):
        """Upper face height and its x'-gradient at planar points."""
        xp = np.asarray(xp, dtype=float)
        shape = xp.shape[:-1]
        if self.kind == "cupTop":
            prof = PowerLawProfile(self.geom.k, self.geom.alpha)
            v, g, _ = prof.evaluate(xp)
            return self.state.h + v, g
        if self.kind == "phiTop":
            t = self.tan_phi
            v = self.z_flat_top - (xp[..., 1] + self.sigma) * t
            g = np.zeros(shape + (2,))
            g[..., 1] = -t
            return v, g
        return np.full(shape, self.z_flat_top), np.zeros(shape + (2,))

    def volume_exact(self):
        """Closed-form volume for the flat-topped kinds (None otherwise)."""
        r0, r1, _, span = self.footprint
        if self.kind in ("fullCylinder", "halfCylinder", "shellHalf"):
            return 0.5 * span * (r1 ** 2 - r0 ** 2) * (self.z_flat_top - self.z_lower)
        return None

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        r = np.hypot(x[..., 0], x[..., 1])
        th = np.mod(np.arctan2(x[..., 1], x[..., 0]), TWO_PI)
        r0, r1, t0, span = self.footprint
        dth = np.mod(th - t0, TWO_PI)
        inside = (r > r0) & (r < r1) & (dth < span if span < TWO_PI else True)
        zt, _ = self.top(x[..., :2])
        return inside & (x[..., 2] > self.z_lower) & (x[..., 2] < zt)

    def boundary_patches(self):
        """All boundary pieces with outward orientation."""
        r0, r1, t0, span = self.footprint
        top_kind = {"fullCylinder": "topFlat", "halfCylinder": "topFlat",
                    "shellHalf": "topFlatAnnulus", "cupTop": "topCup",
                    "phiTop": "topPhi"}[self.kind]
        patches = [SurfacePatch(top_kind, self), SurfacePatch("bottom", self),
                   SurfacePatch("lateralCurved", self, radius=r1)]
        if r0 > 0:
            patches.append(SurfacePatch("lateralCurved", self, radius=r0, inward=True))
        if span < TWO_PI:
            patches.append(SurfacePatch("lateralFlat", self, angle=t0))
            patches.append(SurfacePatch("lateralFlat", self, angle=t0 + np.pi))
        return patches


# ---------------------------------------------------------------------------
# surface patches
# ---------------------------------------------------------------------------

PATCH_KINDS = ("topFlat", "topFlatAnnulus", "topCup", "topPhi", "lateralCurved",
               "lateralFlat", "bottom", "bodySurface", "wallSurface")


@dataclass(frozen=True)
class SurfacePatch:
    kind: str
    parent: DomainSpec
    radius: Optional[float] = None
    angle: Optional[float] = None
    inward: bool = False

    def __post_init__(self):
        if self.kind not in PATCH_KINDS:
            raise ValueError(f"unknown patch kind {self.kind!r}")
        r0, r1, _, span = self.parent.footprint
        if self.kind == "lateralCurved" and not (self.radius or 0) > 0:
            raise DegeneratePatch("lateral curved patch needs a positive radius")
        if r1 - r0 <= 0 or span <= 0:
            raise DegeneratePatch("patch has zero area")

    @property
    def radial_range(self):
        r0, r1, _, _ = self.parent.footprint
        if self.kind in ("bodySurface", "wallSurface"):
            return 0.0, self.parent.rho
        return r0, r1

    @property
    def touches_axis(self):
        return self.kind != "lateralCurved" and self.radial_range[0] == 0.0

    def _graph(self):
        """Height function x' -> (z, grad z) for graph-type patches."""
        dom = self.parent
        if self.kind in ("topFlat", "topFlatAnnulus", "topCup", "topPhi"):
            return dom.top
        if self.kind == "bottom":
            return lambda xp: (np.full(np.shape(xp)[:-1], dom.z_lower),
                               np.zeros(np.shape(xp)))
        if self.kind == "bodySurface":
            def body(xp):
                v, g, _ = dom.geom.cap.evaluate(xp)
                return dom.state.h + v, g
            return body
        if self.kind == "wallSurface":
            def wall(xp):
                v, g, _ = dom.geom.wall.evaluate(xp)
                return v, g
            return wall
        return None

    def param(self, s, t):
        """Map (s, t) in [0,1]^2 to (points, unit outward normals, area elements)."""
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        s, t = np.broadcast_arrays(s, t)
        dom = self.parent
        r0, r1, t0, span = dom.footprint
        if self.kind in ("bodySurface", "wallSurface"):
            t0, span = 0.0, TWO_PI
        graph = self._graph()
        if graph is not None:
            ra, rb = self.radial_range
            r = ra + (rb - ra) * s
            th = t0 + span * t
            c, sn = np.cos(th), np.sin(th)
            xp = np.stack([r * c, r * sn], -1)
            z, gz = graph(xp)
            pts = np.concatenate([xp, z[..., None]], -1)
            # dp/ds x dp/dt = (rb-ra)*span*r * (-gz1, -gz2, 1)
            jac = (rb - ra) * span * r
            nrm = np.concatenate([-gz, np.ones(z.shape + (1,))], -1)
            norm_len = np.linalg.norm(nrm, axis=-1)
            unit = nrm / norm_len[..., None]
            if self.kind in ("bottom", "wallSurface"):
                unit = -unit
            return pts, unit, jac * norm_len
        if self.kind == "lateralCurved":
            R = self.radius
            th = t0 + span * t
            c, sn = np.cos(th), np.sin(th)
            xp = np.stack([R * c, R * sn], -1)
            ztop, _ = dom.top(xp)
            zlo = dom.z_lower
            z = zlo + s * (ztop - zlo)
            pts = np.concatenate([xp, z[..., None]], -1)
            sign = -1.0 if self.inward else 1.0
            unit = sign * np.stack([c, sn, np.zeros_like(c)], -1)
            return pts, unit, span * R * (ztop - zlo)
        # lateralFlat: segment of the diameter at the given angle
        beta = self.angle
        r = r0 + (r1 - r0) * s
        xp = np.stack([r * np.cos(beta), r * np.sin(beta)], -1)
        ztop, _ = dom.top(xp)
        zlo = dom.z_lower
        z = zlo + t * (ztop - zlo)
        pts = np.concatenate([xp, z[..., None]], -1)
        g = dom.gamma
        unit = np.broadcast_to(np.array([np.sin(g), -np.cos(g), 0.0]), pts.shape).copy()
        return pts, unit, (r1 - r0) * (ztop - zlo)


def surface_param(patch: SurfacePatch, s, t):
    return patch.param(s, t)
