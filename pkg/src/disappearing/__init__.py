"""Explicit incoming and disappearing Maxwell solutions outside the unit ball.

The package builds the closed-form dipole-type solutions generated by a
scalar profile, checks the identities they satisfy with an independent
finite-difference oracle, and evolves the reduced radial system with a
dissipative boundary condition on the unit sphere.
"""

from .errors import (
    AccuracyWarning,
    ConstructionError,
    ContractViolation,
    DivergenceError,
    DomainError,
    ParameterError,
    UnsupportedOrderError,
)
from .profiles import Profile, eval_derivs, make_bump, make_custom, make_exponential, zero_profile

__all__ = [
    "AccuracyWarning",
    "ConstructionError",
    "ContractViolation",
    "DivergenceError",
    "DomainError",
    "ParameterError",
    "UnsupportedOrderError",
    "Profile",
    "eval_derivs",
    "make_bump",
    "make_custom",
    "make_exponential",
    "zero_profile",
]

__version__ = "0.1.0"
