"""Invariant 3-forms, symplectic cohomologies and the Type IIA flow on six-dimensional Lie algebras."""

from .exterior import KForm, e, wedge
from .lie_algebra import LieAlgebraSpec, parse_salamon, validate
from .symplectic import SymplecticStructure, make_symplectic, standard_structure

__version__ = "0.1.0"

__all__ = [
    "KForm",
    "LieAlgebraSpec",
    "SymplecticStructure",
    "e",
    "make_symplectic",
    "parse_salamon",
    "standard_structure",
    "validate",
    "wedge",
]
