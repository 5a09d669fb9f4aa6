"""Gravitational lensing, quasilocal mass, and Weyl-metric diagnostics
for negative point masses.

Subpackages by topic:

- ``lens``      thin-lens map, images, magnifications, light curves
- ``caustics``  critical curves, caustics, cusp classification, surveys
- ``spherical`` spherically symmetric curvature/mass/capacity engine
- ``imcf``      radial inverse mean curvature flow and monotonicity checks
- ``weyl``      Zipoy-Voorhees rod-metric diagnostics
- ``cli``       command-line front end (CSV and SVG emitters)
"""

from . import caustics, imcf, lens, spherical, weyl
from .errors import (BoundaryRegimeError, DegenerateKappaError, DomainError,
                     NonConvergenceError, NumericalError, SingularPointError,
                     ValidationError)

__all__ = [
    "caustics", "imcf", "lens", "spherical", "weyl",
    "BoundaryRegimeError", "DegenerateKappaError", "DomainError",
    "NonConvergenceError", "NumericalError", "SingularPointError",
    "ValidationError",
]

__version__ = "0.1.0"
