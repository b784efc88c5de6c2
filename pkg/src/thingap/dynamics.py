"""Time-dependent layer: gap envelopes, the blow-up functional and the power-law
collision family ``h(t) = (T - t)^theta``."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import log
from typing import Callable

import numpy as np
from scipy.integrate import quad, solve_ivp

from .errors import AlphaOutOfRange, NonFinite, StepUnderflow
from .fields import RigidMotion

FLOOR_REL = 1e-14


def gap_derivative_identity(m: RigidMotion, h=0.0):
    """|dh/dt| = |u_P3| for a body at gap ``h``."""
    return abs(m.contact(h)["u_P3"])


# ---------------------------------------------------------------------------
# envelopes
# ---------------------------------------------------------------------------

@dataclass
class Envelope:
    times: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    floor_reached: bool = False
    floor_bracket: tuple | None = None  # (last time above, first time at) the floor

    @property
    def t_end(self):
        return float(self.times[-1])


def _solve(sign, h0, t_end, rhs, rtol, atol, floor):
    def f(t, y):
        return [sign * rhs(t, y[0])]

    events = None
    if sign < 0:
        def hit(t, y):
            return y[0] - floor
        hit.terminal = True
        hit.direction = -1
        events = hit
    sol = solve_ivp(f, (0.0, t_end), [h0], method="RK45", rtol=rtol, atol=atol,
                    dense_output=True, events=events)
    if sol.status == -1:
        raise StepUnderflow(sol.message)
    t_stop = float(sol.t[-1])
    t_hit = float(sol.t_events[0][0]) if events and len(sol.t_events[0]) else None
    return sol, t_stop, t_hit


def envelope_integrate(h0, t_end, rhs: Callable[[float, float], float], *,
                       rtol=1e-10, atol=None, n_out=201):
    """Integrate ``dh/dt = +rhs`` and ``dh/dt = -rhs`` from ``h0``.

    ``rhs(t, h) >= 0`` is a bound on |dh/dt|.  The lower envelope stops at
    the positivity floor ``1e-14 * h0``; that event is reported through
    ``floor_reached`` and ``floor_bracket`` rather than raised.
    """
    if not h0 > 0:
        raise ValueError("h0 must be positive")
    floor = FLOOR_REL * h0
    atol = floor if atol is None else atol

    def bound(t, h):
        v = float(rhs(t, max(h, 0.0)))
        if not np.isfinite(v):
            raise NonFinite(f"envelope rhs is {v} at t={t}")
        return abs(v)

    lo, t_lo, t_hit = _solve(-1, h0, t_end, bound, rtol, atol, floor)
    hi, t_hi, _ = _solve(+1, h0, t_end, bound, rtol, atol, floor)
    t_stop = min(t_lo, t_hi)
    times = np.linspace(0.0, t_stop, n_out)
    lower = np.maximum(lo.sol(times)[0], 0.0)
    upper = hi.sol(times)[0]
    bracket = None
    if t_hit is not None:
        before = lo.t[lo.t < t_hit]
        bracket = (float(before[-1]) if len(before) else 0.0, t_hit)
    return Envelope(times, lower, upper, t_hit is not None, bracket)


# ---------------------------------------------------------------------------
# blow-up functional
# ---------------------------------------------------------------------------

def blowup_functional(h: Callable[[float], float], hess_norm: Callable[[float], float],
                      up_to, t0=0.0):
    """Integral of ``h(t)^(1/2) * hess_norm(t)`` over ``[t0, up_to]``."""
    def integrand(t):
        v = np.sqrt(h(t)) * hess_norm(t)
        if not np.isfinite(v):
            raise NonFinite(f"blow-up integrand is {v} at t={t}")
        return v

    if up_to <= t0:
        return 0.0
    # decade splitting towards up_to keeps near-singular growth resolved
    span = up_to - t0
    cuts = [t0] + [up_to - span * 10.0 ** -k for k in range(1, 13)] + [up_to]
    val = sum(quad(integrand, a, b, limit=200, epsabs=1e-15, epsrel=1e-12)[0]
              for a, b in zip(cuts, cuts[1:]) if b > a)
    if not np.isfinite(val):
        raise NonFinite("blow-up functional is not finite")
    return float(val)


def blowup_partials(h, hess_norm, times, t0=0.0):
    """Partial integrals at increasing ``times``, accumulated segment by segment."""
    out, acc, prev = [], 0.0, t0
    for t in times:
        acc += blowup_functional(h, hess_norm, t, prev)
        out.append(acc)
        prev = t
    return np.array(out)


# ---------------------------------------------------------------------------
# collision family
# ---------------------------------------------------------------------------

def admissible_theta(alpha):
    """Smallest theta for which the energy-class integral converges."""
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    return (1 + alpha) / (3 - alpha)


@dataclass
class CollisionFamily:
    """``h(t) = (T - t)^theta`` with an optional tabulated spin ``omega3(t)``."""
    theta: float = 1.0
    big_t: float = 1.0
    alpha: float = 1.0
    omega3: float | tuple = 0.0

    def __post_init__(self):
        if self.theta < 1:
            raise ValueError("theta must be >= 1")
        if self.big_t <= 0:
            raise ValueError("T must be positive")

    def h(self, t):
        return (self.big_t - np.asarray(t, dtype=float)) ** self.theta

    def hdot(self, t):
        return -self.theta * (self.big_t - np.asarray(t, dtype=float)) ** (self.theta - 1)

    def spin(self, t):
        if np.isscalar(self.omega3):
            return np.full(np.shape(t), float(self.omega3)) if np.ndim(t) else float(self.omega3)
        ts, vs = self.omega3
        return np.interp(t, ts, vs)

    def spin_bound(self):
        if np.isscalar(self.omega3):
            return abs(float(self.omega3))
        return float(np.max(np.abs(self.omega3[1])))

    def condh_exponent(self):
        a = self.alpha
        return 2 * (self.theta - 1) + self.theta * (1 - 3 * a) / (1 + a)


@dataclass
class Admissibility:
    exponent: float
    energy_bounded: bool
    grad_square_integrable: bool
    threshold_theta: float
    cutoffs: list = field(default_factory=list)
    partials: list = field(default_factory=list)
    differences: list = field(default_factory=list)
    growth_per_decade: list = field(default_factory=list)
    cauchy: bool = False

    @property
    def admissible(self):
        return self.energy_bounded and self.grad_square_integrable

    def as_dict(self):
        return {"exponent": self.exponent, "energyBounded": self.energy_bounded,
                "gradSquareIntegrable": self.grad_square_integrable,
                "thresholdTheta": self.threshold_theta, "admissible": self.admissible,
                "cutoffs": list(self.cutoffs), "partials": list(self.partials),
                "differences": list(self.differences),
                "growthPerDecade": list(self.growth_per_decade), "cauchy": self.cauchy}


def energy_class_check(fam: CollisionFamily, cutoffs=(1e-2, 1e-3, 1e-4)):
    """Decide the energy-class conditions for the power family.

    Convergence of the gradient-square integral is decided by the closed-form
    exponent; the partial integrals up to ``T - eps`` only illustrate it.
    """
    a = fam.alpha
    if not 1 / 3 < a <= 1:
        raise AlphaOutOfRange(f"alpha={a} outside (1/3, 1]")
    e = fam.condh_exponent()
    q = (1 - 3 * a) / (1 + a)

    def integrand(t):
        return fam.hdot(t) ** 2 * fam.h(t) ** q

    cutoffs = sorted(cutoffs, reverse=True)
    partials = []
    acc, prev = 0.0, 0.0
    for eps in cutoffs:
        # substitute s = T - t so the singular end sits at the lower limit
        val, _ = quad(lambda s: integrand(fam.big_t - s), eps, fam.big_t - prev,
                      limit=400, epsabs=1e-14, epsrel=1e-12)
        acc += val
        prev = fam.big_t - eps
        partials.append(acc)
    diffs = list(np.diff(partials))
    decades = [log(c0 / c1, 10) for c0, c1 in zip(cutoffs, cutoffs[1:])]
    growth = [d / dec for d, dec in zip(diffs, decades)]
    cauchy = bool(len(diffs) >= 2 and all(d1 < 0.9 * d0 for d0, d1 in zip(diffs, diffs[1:])))
    bounded = fam.theta >= 1 and np.isfinite(fam.spin_bound())
    return Admissibility(float(e), bool(bounded), bool(e > -1), admissible_theta(a),
                         list(cutoffs), [float(v) for v in partials],
                         [float(d) for d in diffs], [float(g) for g in growth], cauchy)


@dataclass
class TrajectoryReport:
    times: np.ndarray
    gaps: np.ndarray
    bounds: np.ndarray
    blowup_partials: np.ndarray
    admissibility: Admissibility

    def __post_init__(self):
        if np.any(np.asarray(self.gaps) <= 0):
            raise ValueError("gaps must stay positive over the reported window")
