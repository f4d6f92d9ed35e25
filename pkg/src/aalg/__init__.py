"""Lorentzian geometry of almost abelian Lie groups."""

__version__ = "0.1.0"

from .algebra import AlmostAbelianAlgebra, bracket, decompose, transform  # noqa: E402
from .metric import LorentzianStructure, coordinate_metric, eta_matrix  # noqa: E402
from .curvature import (  # noqa: E402
    curvature, is_flat, is_locally_symmetric, is_ricci_flat, levi_civita,
    ricci_closed_form, ricci_general,
)
from .petrov import DomainError, PetrovSolution, build  # noqa: E402

__all__ = [
    "AlmostAbelianAlgebra", "bracket", "decompose", "transform",
    "LorentzianStructure", "coordinate_metric", "eta_matrix",
    "curvature", "is_flat", "is_locally_symmetric", "is_ricci_flat", "levi_civita",
    "ricci_closed_form", "ricci_general",
    "DomainError", "PetrovSolution", "build",
]
