"""Independent reference computations used to freeze expected test values.

Nothing here imports the package: fluxes are integrated with mpmath on the
explicit surfaces, the example velocity field is differentiated exactly with
sympy, and scalar formulas are evaluated in high precision.  Run this file
directly to print the frozen constants used by the test modules.
"""
from __future__ import annotations

import mpmath as mp
import sympy as sp

mp.mp.dps = 30


def rigid_velocity(u_p, omega, h, x):
    d = (x[0], x[1], x[2] - h)
    w = omega
    cross = (w[1] * d[2] - w[2] * d[1], w[2] * d[0] - w[0] * d[2], w[0] * d[1] - w[1] * d[0])
    return [u_p[i] + cross[i] for i in range(3)]


def graph_flux(top, top_grad, u_p, omega, h, r0, r1, gamma):
    """Upward flux through the graph x3 = top(x1, x2) over a half annulus."""
    def integrand(r, t):
        x1, x2 = r * mp.cos(t), r * mp.sin(t)
        x = (x1, x2, top(x1, x2))
        u = rigid_velocity(u_p, omega, h, x)
        g1, g2 = top_grad(x1, x2)
        return (-u[0] * g1 - u[1] * g2 + u[2]) * r
    return mp.quad(integrand, [r0, r1], [gamma, gamma + mp.pi])


def flux_flat(rho, gamma, u_p, omega, h=0.01, annulus=True):
    z = h + 0.05
    return graph_flux(lambda a, b: z, lambda a, b: (0, 0), u_p, omega, h,
                      rho / 2 if annulus else 0, rho, gamma)


def flux_cup(rho, gamma, k, alpha, u_p, omega, h=0.01):
    def top(a, b):
        return h + k * mp.sqrt(a * a + b * b) ** (1 + alpha)

    def grad(a, b):
        r = mp.sqrt(a * a + b * b)
        c = k * (1 + alpha) * r ** (alpha - 1) if r > 0 else 0
        return c * a, c * b
    return graph_flux(top, grad, u_p, omega, h, 0, rho, gamma)


def flux_phi(rho, gamma, tan_phi, u_p, omega, h=0.01, lift=0.05):
    return graph_flux(lambda a, b: h + lift - b * tan_phi, lambda a, b: (0, -tan_phi),
                      u_p, omega, h, 0, rho, gamma)


def example4_hessian_norm(r, z, h, k=1.0, hdot=1.0, omega3=0.0):
    """Exact Frobenius norm of the second derivatives of curl(F * Psi) with
    Psi = S(x3 / (h + k r^2)) (radial/vertical cut-offs inactive)."""
    x, y, w = sp.symbols("x y w", real=True)
    t = w / (h + k * (x ** 2 + y ** 2))
    S = 126 * t ** 5 - 420 * t ** 6 + 540 * t ** 7 - 315 * t ** 8 + 70 * t ** 9
    F = [sp.Rational(1, 2) * (-hdot * y) * S, sp.Rational(1, 2) * (hdot * x) * S,
         -sp.Rational(1, 2) * omega3 * (x ** 2 + y ** 2) * S]
    u = [sp.diff(F[2], y) - sp.diff(F[1], w), sp.diff(F[0], w) - sp.diff(F[2], x),
         sp.diff(F[1], x) - sp.diff(F[0], y)]
    v = (x, y, w)
    total = 0
    pt = {x: sp.Float(r, 30), y: 0, w: sp.Float(z, 30)}
    for ui in u:
        for a in v:
            for b in v:
                total += sp.diff(ui, a, b).evalf(30, subs=pt) ** 2
    return mp.sqrt(mp.mpf(str(total)))


def condh_partial(theta, alpha, eps, big_t=1):
    e = 2 * (theta - 1) + theta * (1 - 3 * mp.mpf(alpha)) / (1 + alpha)
    return mp.quad(lambda s: theta ** 2 * s ** e, [eps, big_t])


def taylor_i1(cubic, rho):
    d0, d1, d2, d3 = cubic

    def g1(x, y):
        return 3 * d0 * x * x + 2 * d1 * x * y + d2 * y * y

    def g2(x, y):
        return d1 * x * x + 2 * d2 * x * y + 3 * d3 * y * y
    f = lambda g: mp.quad(lambda r, t: g(r * mp.cos(t), r * mp.sin(t)) * r,
                          [0, rho], [0, 2 * mp.pi])
    return f(g1), f(g2)


if __name__ == "__main__":
    print("gap_height", mp.mpf(2) * mp.mpf("0.05") ** mp.mpf("1.5"))
    print("fluid volume", mp.quad(lambda r: 2 * mp.pi * r * (mp.mpf("0.01") + r * r), [0, "0.1"]))
    print("weak u3", 100 * mp.mpf("0.031") ** mp.mpf("1.5"))
    print("strong sigma", 3 / mp.sqrt(mp.pi) * 100 * mp.mpf("0.021") ** mp.mpf("2.5"))
    print("strong h 2d", 2 * mp.mpf("0.01") ** mp.mpf("1.75") + 3 * mp.mpf("0.01") ** mp.mpf("1.25"))
    print("flux flat", flux_flat(0.7, 0.3, (0.2, -0.4, 0.9), (0.5, -0.3, 0.8)))
    print("flux full", flux_flat(0.7, 0.3, (0.2, -0.4, 0.9), (0.5, -0.3, 0.8), annulus=False))
    print("flux cup", flux_cup(0.6, 1.1, 1.3, 0.5, (0.3, 0.7, -0.2), (-0.6, 0.4, 0.1)))
    print("flux phi", flux_phi(0.8, 2.0, 0.2, (0.1, -0.5, 0.3), (0, 0.6, -0.9)))
    print("hessian", example4_hessian_norm(0.05, 0.005, 0.01))
    for th, a in ((1, 1), (1.2, 1), (1, 0.5)):
        print("condh", th, a, [condh_partial(th, a, e) for e in ("1e-2", "1e-3", "1e-4")])
    print("I1", [taylor_i1((1.0, 0.0, 0.0, 0.0), rho) for rho in (0.1, 0.05, 0.025)])
