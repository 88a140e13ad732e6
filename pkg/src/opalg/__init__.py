"""Finite-dimensional C*-algebra toolkit: spectra, states, GNS, projections,
exact truncations of a commutative projection algebra, and tree ranks."""
from .algebra import Algebra, AlgebraPresentation, generate, subalgebra, wedderburn
from .matkernel import Tolerance
from .spectral import joint_spectrum, spectrum
from .states import State

__all__ = [
    "Algebra",
    "AlgebraPresentation",
    "State",
    "Tolerance",
    "generate",
    "joint_spectrum",
    "spectrum",
    "subalgebra",
    "wedderburn",
]
