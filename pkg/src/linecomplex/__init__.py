"""M-system lattices, fundamental line complexes and exact verification of their identities."""
from .errors import LineComplexError
from .field import GAUSS, RATIONAL, get_field
from .lattice import Box, LatticeField, parse_box
from .msystem import MatrixLattice, MSystemShape, fill_from_cauchy, generate, tau_fill
from .complexes import (
    LineComplexLattice,
    complex_from_msystem,
    eighth_line,
    extract_msystem,
    fill_geometric_cp3,
    fill_geometric_cp4,
    lift_to_cp4,
    verify_complex,
)
from .hexahedron import HexState, hex_fill, hex_step, hex_to_msystem
from .correlation import polarity_from_hexagon
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = [
    "LineComplexError",
    "RATIONAL",
    "GAUSS",
    "get_field",
    "Box",
    "LatticeField",
    "parse_box",
    "MSystemShape",
    "MatrixLattice",
    "fill_from_cauchy",
    "generate",
    "tau_fill",
    "LineComplexLattice",
    "complex_from_msystem",
    "eighth_line",
    "extract_msystem",
    "fill_geometric_cp3",
    "fill_geometric_cp4",
    "lift_to_cp4",
    "verify_complex",
    "HexState",
    "hex_fill",
    "hex_step",
    "hex_to_msystem",
    "polarity_from_hexagon",
    "KERNEL_BACKEND",
]
