"""Symmetry analysis and Chebyshev collocation for the cylindrical KdV equation

    u_t + 6 u u_x + u_xxx + u / (2t) = 0.
"""

from symkdv.errors import (
    DegenerateElementError,
    DimensionError,
    DomainError,
    GridMismatchError,
    InvalidGeneratorError,
    InvalidOrderError,
    InvalidResolutionError,
    SymKdVError,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateElementError",
    "DimensionError",
    "DomainError",
    "GridMismatchError",
    "InvalidGeneratorError",
    "InvalidOrderError",
    "InvalidResolutionError",
    "SymKdVError",
]
