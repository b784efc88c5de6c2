"""Sanity checks on the example velocity field.

The field is a curl, so its exact divergence vanishes; a central-difference
divergence therefore only shows truncation error, which falls by four each
time the step is halved.  The second derivatives are compared with their
Richardson extrapolation.
"""
import numpy as np

from thingap.fields import divergence_residual, example4, hessian_norm
from thingap.geometry import GapGeometry, GapState

geom = GapGeometry.power_law(1.0, 1.0, sigma0=2.0)
f = example4(1.0, 1.0, geom, GapState(0.1, 1.0))
x = np.array([0.375, 0.0, 0.219])  # inside the radial cut-off band

print("step      divergence residual   ratio")
prev = None
for step in (4e-4, 2e-4, 1e-4, 5e-5, 2.5e-5):
    r = abs(divergence_residual(f, x, step))
    print(f"{step:.1e}   {r:.3e}" + (f"            {prev / r:.3f}" if prev else ""))
    prev = r
print(f"trace of the analytic Jacobian: {np.trace(f.jacobian(x)):.1e}")

g = example4(1.0, 0.0, geom, GapState(0.01, 1.0))
y = [0.05, 0.0, 0.005]
a, b = hessian_norm(g, y, step=2e-5), hessian_norm(g, y, step=1e-5)
print(f"\n|D^2 u| at r=0.05, mid-gap: {a:.6f} (step 2e-5), {b:.6f} (1e-5), "
      f"extrapolated {(4 * b - a) / 3:.6f}")
