"""Exact curve counts on Hirzebruch surfaces.

Two independent computations of the same stationary descendant counts:
direct enumeration of decorated floor diagrams (`floors`) and matrix
elements of transfer operators on a bosonic Fock space (`fock`, with the
graphical expansion in `feynman`).  Both work over exact rationals or
over formal vertex symbols (`formal`).  Shared input validation and
polygon geometry live in `core`.
"""

from .core import DiscreteData, validate
from .floors import FloorDiagram, enumerate_diagrams, multiplicity
from .formal import FormalValue, VertexOracle, VertexSymbol

__all__ = [
    "DiscreteData",
    "FloorDiagram",
    "FormalValue",
    "VertexOracle",
    "VertexSymbol",
    "enumerate_diagrams",
    "multiplicity",
    "validate",
]

__version__ = "0.1.0"
