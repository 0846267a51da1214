"""Primitivity, exponents and synchronizing probability functions of
sets of binary NZ matrices, computed with exact rational arithmetic."""

__version__ = "0.1.0"

from .boolmat import BinaryMatrix, BinaryVector, MatrixSet, bool_product
from .errors import CapExceededError, NotPrimitiveError, NotSynchronizingError
from .families import builtin_example
from .automata import aut_of, exponent_bfs, exponent_bounds, is_primitive, reset_threshold_exact
from .spf import spf_k, spf_kbar, spf_keq

__all__ = [
    "__version__",
    "BinaryMatrix",
    "BinaryVector",
    "MatrixSet",
    "bool_product",
    "CapExceededError",
    "NotPrimitiveError",
    "NotSynchronizingError",
    "builtin_example",
    "aut_of",
    "exponent_bfs",
    "exponent_bounds",
    "is_primitive",
    "reset_threshold_exact",
    "spf_k",
    "spf_kbar",
    "spf_keq",
]
