"""Tensor-product Gauss-Legendre quadrature on the contact-chart domains.

Volume integrals run over (r, theta, xi) where xi in [0, 1] rescales the
vertical extent at each planar node.  Restricted to the fluid, xi is exactly
the scaled gap coordinate (x3 - g_wall) / (h + g - g_wall), so the thin gap
becomes a unit box.  Without the restriction the vertical range is split at
the wall and at the body surface so that each piece is integrated separately.

Every result carries a two-level error estimate (base grid against a grid
with doubled cell counts).  Summation is done in a fixed order so identical
inputs give bit-identical values.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import DefectExceeded, NonFinite
from .fields import VelocityField, hessian

CHUNK = 1 << 16


@dataclass(frozen=True)
class QuadratureConfig:
    radial_order: int = 8
    angular_order: int = 8
    vertical_order: int = 8
    radial_cells: int = 4
    angular_cells: int = 2
    vertical_cells: int = 2
    grading_levels: int = 30
    graded: bool | None = None  # None: grade the axis cell only for fractional alpha
    refine_tol: float = 1e-6
    defect_budget: float = 1e-3

    def __post_init__(self):
        if min(self.radial_order, self.angular_order, self.vertical_order) < 2:
            raise ValueError("Gauss orders must be >= 2")
        if min(self.radial_cells, self.angular_cells, self.vertical_cells) < 1:
            raise ValueError("cell counts must be >= 1")
        if not self.refine_tol > 0:
            raise ValueError("refine_tol must be positive")

    def refined(self):
        return replace(self, radial_cells=2 * self.radial_cells,
                       angular_cells=2 * self.angular_cells,
                       vertical_cells=2 * self.vertical_cells)


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    defect: float = 0.0
    flagged: bool = False
    refine_target: float = np.inf

    @property
    def converged(self):
        return self.error_estimate <= self.refine_target


@lru_cache(maxsize=64)
def _leggauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


def gauss_nodes(a, b, cells, order):
    """Composite Gauss nodes and weights on [a, b] with uniform cells."""
    x, w = _leggauss(order)
    edges = np.linspace(a, b, cells + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    return (lo + (hi - lo) * x).ravel(), ((hi - lo) * w).ravel()


def graded_nodes(a, b, cells, order, levels):
    """Like :func:`gauss_nodes`, but the first cell is split geometrically
    towards ``a`` (ratio 1/2) to resolve power-type kinks at ``a``."""
    x, w = _leggauss(order)
    edges = np.linspace(a, b, cells + 1)
    first = edges[1] - a
    inner = a + first * 0.5 ** np.arange(levels, 0, -1)
    edges = np.concatenate([[a], inner, edges[1:]])
    lo, hi = edges[:-1, None], edges[1:, None]
    return (lo + (hi - lo) * x).ravel(), ((hi - lo) * w).ravel()


def _split_integrand(out):
    if isinstance(out, tuple):
        vals, excl = out
        return np.asarray(vals, dtype=float), np.asarray(excl, dtype=bool)
    return np.asarray(out, dtype=float), None


def _accumulate(points, weights, integrand, total, defect, wsum):
    """Fixed-order weighted sum over chunks; returns updated accumulators."""
    n = len(weights)
    for i in range(0, n, CHUNK):
        p = points[i:i + CHUNK]
        w = weights[i:i + CHUNK]
        vals, excl = _split_integrand(integrand(p))
        if excl is not None:
            defect += float(np.dot(w, excl))
            vals = np.where(excl, 0.0, vals)
        if not np.all(np.isfinite(vals)):
            raise NonFinite("integrand returned non-finite values")
        total += float(np.dot(w, vals))
        wsum += float(np.sum(w))
    return total, defect, wsum


def _radial(dom_geom, r0, r1, cfg, touches_axis):
    graded = cfg.graded
    if graded is None:
        graded = dom_geom is not None and dom_geom.alpha < 1.0
    if touches_axis and graded:
        return graded_nodes(r0, r1, cfg.radial_cells, cfg.radial_order, cfg.grading_levels)
    return gauss_nodes(r0, r1, cfg.radial_cells, cfg.radial_order)


def _vertical_pieces(dom, xp, restrict_to_fluid):
    geom, h = dom.geom, dom.state.h
    z_lo = np.full(xp.shape[:-1], dom.z_lower)
    z_hi, _ = dom.top(xp)
    wall = geom.wall.value(xp)
    body = h + geom.cap.value(xp)
    if restrict_to_fluid:
        lo = np.maximum(z_lo, wall)
        hi = np.maximum(np.minimum(z_hi, body), lo)
        return [(lo, hi)]
    b1 = np.clip(wall, z_lo, z_hi)
    b2 = np.clip(body, b1, z_hi)
    return [(z_lo, b1), (b1, b2), (b2, z_hi)]


def _volume_once(dom, integrand, cfg, restrict_to_fluid):
    r0, r1, t0, span = dom.footprint
    rn, rw = _radial(dom.geom, r0, r1, cfg, r0 == 0.0)
    tn, tw = gauss_nodes(t0, t0 + span, cfg.angular_cells, cfg.angular_order)
    xn, xw = gauss_nodes(0.0, 1.0, cfg.vertical_cells, cfg.vertical_order)
    R, T = np.meshgrid(rn, tn, indexing="ij")
    W2 = np.outer(rw * rn, tw)
    xp = np.stack([R * np.cos(T), R * np.sin(T)], -1).reshape(-1, 2)
    W2 = W2.ravel()
    total = defect = wsum = 0.0
    for lo, hi in _vertical_pieces(dom, xp, restrict_to_fluid):
        lo, hi = lo.ravel(), hi.ravel()
        length = hi - lo
        keep = length > 0
        if not np.any(keep):
            continue
        xk, wk, lok, lenk = xp[keep], W2[keep], lo[keep], length[keep]
        z = lok[:, None] + xn[None, :] * lenk[:, None]
        pts = np.concatenate([np.repeat(xk, len(xn), axis=0), z.reshape(-1, 1)], axis=1)
        w = (wk[:, None] * lenk[:, None] * xw[None, :]).ravel()
        total, defect, wsum = _accumulate(pts, w, integrand, total, defect, wsum)
    return total, defect, wsum


def _finish(coarse, fine, cfg):
    (v0, _, _), (v1, d1, w1) = coarse, fine
    frac = d1 / w1 if w1 > 0 else 0.0
    err = abs(v1 - v0)
    return IntegralResult(v1, err, frac, flagged=frac > cfg.defect_budget,
                          refine_target=cfg.refine_tol * abs(v1))


def volume_integral(dom, integrand, cfg: QuadratureConfig = QuadratureConfig(),
                    restrict_to_fluid=False):
    """Integrate ``integrand(points (M, 3)) -> (M,)`` over a DomainSpec.

    The integrand may return ``(values, excluded)``; excluded nodes contribute
    nothing and their weight is reported as the defect fraction.
    """
    dom.geom.check_chart(np.array([dom.rho * (1 - 1e-15), 0.0]))
    coarse = _volume_once(dom, integrand, cfg, restrict_to_fluid)
    fine = _volume_once(dom, integrand, cfg.refined(), restrict_to_fluid)
    return _finish(coarse, fine, cfg)


def _box_once(lo, hi, integrand, cfg):
    axes = [gauss_nodes(lo[i], hi[i], c, o) for i, (c, o) in enumerate(
        [(cfg.radial_cells, cfg.radial_order), (cfg.angular_cells, cfg.angular_order),
         (cfg.vertical_cells, cfg.vertical_order)])]
    X = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    W = np.einsum("i,j,k->ijk", *[a[1] for a in axes])
    pts = np.stack([x.ravel() for x in X], -1)
    return _accumulate(pts, W.ravel(), integrand, 0.0, 0.0, 0.0)


def box_integral(lo, hi, integrand, cfg: QuadratureConfig = QuadratureConfig()):
    """Integrate over the axis-aligned box [lo, hi]."""
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    return _finish(_box_once(lo, hi, integrand, cfg),
                   _box_once(lo, hi, integrand, cfg.refined()), cfg)


def _surface_once(patch, integrand, cfg):
    geom = patch.parent.geom
    sn, sw = _radial(geom, 0.0, 1.0, cfg, patch.touches_axis)
    tn, tw = gauss_nodes(0.0, 1.0, cfg.angular_cells, cfg.angular_order)
    S, T = np.meshgrid(sn, tn, indexing="ij")
    pts, nrm, area = patch.param(S.ravel(), T.ravel())
    w = np.outer(sw, tw).ravel() * area
    total, wsum = 0.0, 0.0
    for i in range(0, len(w), CHUNK):
        vals = np.asarray(integrand(pts[i:i + CHUNK], nrm[i:i + CHUNK]), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NonFinite("integrand returned non-finite values")
        total += float(np.dot(w[i:i + CHUNK], vals))
        wsum += float(np.sum(w[i:i + CHUNK]))
    return total, 0.0, wsum


def surface_integral(patch, integrand, cfg: QuadratureConfig = QuadratureConfig()):
    """Integrate ``integrand(points, unit_normals) -> (M,)`` over a patch."""
    return _finish(_surface_once(patch, integrand, cfg),
                   _surface_once(patch, integrand, cfg.refined()), cfg)


def flux(patch, f, cfg=QuadratureConfig()):
    """Outward flux of a velocity field (or rigid motion) through a patch."""
    vel = f.velocity
    return surface_integral(patch, lambda p, n: np.einsum("...i,...i->...", vel(p), n), cfg)


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def _grad_power(f, p):
    def integrand(pts):
        J = f.jacobian(pts) if f.grad_mode == "analytic" else _fd_grad(f, pts)
        sq = np.einsum("...ij,...ij->...", J, J)
        return sq if p == 2 else sq ** (p / 2)
    return integrand


def _fd_grad(f, pts):
    from .fields import gradient
    return gradient(f, pts)


def lp_gradient_integral(f: VelocityField, dom, p=2.0, cfg=QuadratureConfig(),
                         restrict_to_fluid=True):
    """IntegralResult for the integral of |grad u|^p over the domain."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return volume_integral(dom, _grad_power(f, p), cfg, restrict_to_fluid)


def lp_gradient_norm(f: VelocityField, dom, restrict_to_fluid=True, p=2.0,
                     cfg=QuadratureConfig()):
    res = lp_gradient_integral(f, dom, p, cfg, restrict_to_fluid)
    return max(res.value, 0.0) ** (1.0 / p)


def box_gradient_norm(f: VelocityField, lo, hi, p=2.0, cfg=QuadratureConfig()):
    res = box_integral(lo, hi, _grad_power(f, p), cfg)
    return max(res.value, 0.0) ** (1.0 / p)


def hessian_square_integrand(f: VelocityField, step=None, rel_step=1e-2):
    """|grad^2 u|^2 with per-node steps no larger than ``rel_step`` times the
    local gap; nodes whose stencil cannot be fitted are excluded."""
    step = f.grad_step if step is None else step

    def integrand(pts):
        if f.geom is not None:
            gap = f.state.h + f.geom.cap.value(pts[:, :2]) - f.geom.wall.value(pts[:, :2])
            s_max = np.minimum(step, rel_step * np.abs(gap))
        else:
            s_max = np.full(len(pts), step)
        H = hessian(f, pts, step=s_max, min_step=64 * np.finfo(float).eps)
        out = np.einsum("...ijk,...ijk->...", H, H)
        excl = np.isnan(out)
        return out, excl
    return integrand


def l2_hessian_norm(f: VelocityField, dom, cfg=QuadratureConfig(), restrict_to_fluid=True,
                    step=None, full=False):
    res = volume_integral(dom, hessian_square_integrand(f, step), cfg, restrict_to_fluid)
    if res.flagged:
        raise DefectExceeded(f"excluded fraction {res.defect:.3g} exceeds budget "
                             f"{cfg.defect_budget:g}")
    val = max(res.value, 0.0) ** 0.5
    return (val, res) if full else val
