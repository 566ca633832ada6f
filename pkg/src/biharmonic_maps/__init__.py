"""Explicit harmonic and biharmonic maps from the unit ball into spheres.

The package evaluates the catalog maps, checks the harmonic and biharmonic
map equations pointwise (closed forms and finite differences), integrates
energies over the ball and evaluates second variations of the bienergy.
"""

__version__ = "0.1.0"

from .errors import (
    DivergentIntegral,
    DomainError,
    SingularPointError,
    StencilTooLargeError,
)
from .maps import MapKind, MapSpec, analytic_jet, critical_angle, eval_map

__all__ = [
    "__version__",
    "DivergentIntegral",
    "DomainError",
    "SingularPointError",
    "StencilTooLargeError",
    "MapKind",
    "MapSpec",
    "analytic_jet",
    "critical_angle",
    "eval_map",
]
