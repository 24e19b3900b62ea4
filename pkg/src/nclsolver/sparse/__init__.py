"""
Sparse Module - Symmetric Sparse Linear Algebra

Lower-triangle storage, minimum degree ordering, static-pivoting LDL^T with inertia,
Richardson refinement and Matrix Market dumps.
"""

from .matrix import SparseSymMatrix
from .ordering import SymbolicFactorization, analyze, minimum_degree_ordering
from .ldl import LdlFactors, factorize, inertia_of
from .refine import RefinementResult, solve_refined
from .mmio import dump_matrix, load_matrix

__all__ = [
    "SparseSymMatrix",
    "SymbolicFactorization",
    "analyze",
    "minimum_degree_ordering",
    "LdlFactors",
    "factorize",
    "inertia_of",
    "RefinementResult",
    "solve_refined",
    "dump_matrix",
    "load_matrix",
]
