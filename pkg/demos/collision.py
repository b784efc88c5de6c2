"""Which power-law approaches h(t) = (T - t)^theta keep finite energy.

For each (alpha, theta) the closed-form exponent of the gradient-square
integrand decides convergence; the numerical partial integrals up to T - eps
illustrate it.  The second part integrates the gap envelopes for a bound
|dh/dt| <= C h, which can never reach zero in finite time.
"""
import numpy as np

from thingap.dynamics import CollisionFamily, admissible_theta, energy_class_check, \
    envelope_integrate

for alpha in (1.0, 0.75, 0.5):
    print(f"alpha={alpha:g}: convergent for theta > {admissible_theta(alpha):.4f}")
    for theta in (1.0, 1.2, 1.5):
        adm = energy_class_check(CollisionFamily(theta, 1.0, alpha))
        tag = "finite energy" if adm.admissible else "divergent"
        print(f"  theta={theta:g}: exponent {round(adm.exponent, 12) + 0.0:+.3f}, partials "
              f"{np.round(adm.partials, 3).tolist()} -> {tag}")

env = envelope_integrate(1e-2, 3.0, lambda t, h: 2.0 * h)
print(f"\nenvelope with |dh/dt| <= 2h from h0=1e-2: lower gap at t=3 is {env.lower[-1]:.3e}"
      f" (exact {1e-2 * np.exp(-6):.3e}), floor reached: {env.floor_reached}")
env = envelope_integrate(1e-2, 3.0, lambda t, h: 1.0)
print(f"envelope with |dh/dt| <= 1: floor reached at t in {env.floor_bracket}")
