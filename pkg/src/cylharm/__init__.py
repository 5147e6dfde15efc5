"""Eigenfunction expansions of the 3-D Laplace fundamental solution in parabolic and elliptic cylinder coordinates."""

from .errors import (
    BranchCutError,
    CoincidentPoints,
    CylharmError,
    DegenerateSolution,
    DomainError,
    NonConvergence,
    PoleError,
    SlowDecay,
    StiffnessError,
    UnderflowError,
)
from .laplace3d import (
    CylinderPoint,
    direct,
    expand_elliptic_j0,
    expand_elliptic_k0,
    expand_parabolic_j0,
    expand_parabolic_k0,
    to_elliptic,
    to_parabolic,
)
from .quadrature import QuadratureSpec
from .report import ExpansionReport, Method, SeriesTruncation

__version__ = "0.1.0"

__all__ = [
    "BranchCutError",
    "CoincidentPoints",
    "CylharmError",
    "CylinderPoint",
    "DegenerateSolution",
    "DomainError",
    "ExpansionReport",
    "Method",
    "NonConvergence",
    "PoleError",
    "QuadratureSpec",
    "SeriesTruncation",
    "SlowDecay",
    "StiffnessError",
    "UnderflowError",
    "direct",
    "expand_elliptic_j0",
    "expand_elliptic_k0",
    "expand_parabolic_j0",
    "expand_parabolic_k0",
    "to_elliptic",
    "to_parabolic",
]
