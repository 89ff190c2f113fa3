"""Adjoint-orbit shadows of sl_n over Z/p^r and representation zeta functions."""

from .rings import LocalRing, RingElem
from .lattices import lattice

__version__ = "0.1.0"

__all__ = ["LocalRing", "RingElem", "lattice", "__version__"]
