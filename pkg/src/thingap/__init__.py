"""Numerical checks for rigid bodies moving close to a wall through a viscous
fluid: contact-chart geometry, cut-off curl velocity fields, flux identities,
gap estimates and collision dynamics."""
from .errors import ThinGapError
from .fields import (CutoffSpec, RigidField, RigidMotion, divergence_residual, eval_example4,
                     eval_rigid, example4, example4b, gradient, hessian_norm)
from .geometry import DomainSpec, GapGeometry, GapState, gap_height, region, surface_param
from .quadrature import (IntegralResult, QuadratureConfig, box_integral, flux,
                         l2_hessian_norm, lp_gradient_norm, surface_integral, volume_integral)

__version__ = "0.1.0"
