"""
Lower-triangle compressed-column storage for symmetric matrices
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.sparse as sp

from ..core.exceptions import DimensionError


@dataclass(frozen=True, eq=False)
class SparseSymMatrix:
    """Symmetric matrix stored as its lower triangle in CSC form (sorted rows, no duplicates)"""

    n: int
    colptr: np.ndarray
    rowind: np.ndarray
    data: np.ndarray

    @classmethod
    def from_triplets(
        cls, n: int, rows: np.ndarray, cols: np.ndarray, vals: np.ndarray
    ) -> "SparseSymMatrix":
        """Build from (i, j, v) triplets; upper entries are mirrored and duplicates summed"""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=float)
        if not (rows.shape == cols.shape == vals.shape):
            raise DimensionError("Triplet arrays must have equal length")
        if rows.size and (rows.min() < 0 or cols.min() < 0 or rows.max() >= n or cols.max() >= n):
            raise DimensionError(f"Triplet index out of range for dimension {n}")
        lo = np.maximum(rows, cols)
        hi = np.minimum(rows, cols)
        keys = hi * n + lo
        unique, inverse = np.unique(keys, return_inverse=True)
        data = np.bincount(inverse, weights=vals, minlength=unique.size)
        rowind = unique % n
        colind = unique // n
        colptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(colptr, colind + 1, 1)
        return cls(n, np.cumsum(colptr), rowind.astype(np.int64), data.astype(float))

    @classmethod
    def from_dense(cls, A: np.ndarray, keep_diagonal: bool = True) -> "SparseSymMatrix":
        """Build from a dense symmetric array, keeping nonzeros of the lower triangle"""
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError(f"Expected a square array, got shape {A.shape}")
        n = A.shape[0]
        mask = np.tril(A != 0.0)
        if keep_diagonal:
            mask |= np.eye(n, dtype=bool)
        rows, cols = np.nonzero(mask)
        return cls.from_triplets(n, rows, cols, A[rows, cols])

    @classmethod
    def from_scipy(cls, M: sp.spmatrix) -> "SparseSymMatrix":
        """Build from a scipy sparse matrix holding either the full matrix or its lower triangle"""
        coo = sp.tril(sp.coo_matrix(M)).tocoo()
        if coo.shape[0] != coo.shape[1]:
            raise DimensionError(f"Expected a square matrix, got shape {coo.shape}")
        return cls.from_triplets(coo.shape[0], coo.row, coo.col, coo.data)

    def with_values(self, data: np.ndarray) -> "SparseSymMatrix":
        """Same pattern, new values"""
        data = np.asarray(data, dtype=float)
        if data.shape != self.data.shape:
            raise DimensionError(f"Expected {self.nnz} values, got {data.shape}")
        return SparseSymMatrix(self.n, self.colptr, self.rowind, data)

    @property
    def nnz(self) -> int:
        return int(self.rowind.size)

    @cached_property
    def colind(self) -> np.ndarray:
        """Column index of every stored entry"""
        return np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.colptr))

    def lower_scipy(self) -> sp.csc_matrix:
        return sp.csc_matrix((self.data, self.rowind, self.colptr), shape=(self.n, self.n))

    @cached_property
    def full(self) -> sp.csr_matrix:
        """Full symmetric matrix as CSR (used for products)"""
        lower = self.lower_scipy()
        strict = sp.tril(lower, k=-1)
        return (lower + strict.T).tocsr()

    def to_dense(self) -> np.ndarray:
        return np.asarray(self.full.todense())

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionError(f"Expected vector of length {self.n}, got {x.shape}")
        return np.asarray(self.full @ x).ravel()

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.data))) if self.data.size else 0.0

    def diagonal(self) -> np.ndarray:
        diag = np.zeros(self.n)
        on_diag = self.rowind == self.colind
        diag[self.rowind[on_diag]] = self.data[on_diag]
        return diag

    def same_pattern(self, other: Optional["SparseSymMatrix"]) -> bool:
        if other is None or other.n != self.n or other.nnz != self.nnz:
            return False
        return bool(
            np.array_equal(self.colptr, other.colptr) and np.array_equal(self.rowind, other.rowind)
        )

    def validate(self) -> None:
        """Check the storage invariants; raises DimensionError on violation"""
        if self.colptr.shape != (self.n + 1,) or self.colptr[0] != 0:
            raise DimensionError("Column pointer array is malformed")
        if np.any(np.diff(self.colptr) < 0) or self.colptr[-1] != self.nnz:
            raise DimensionError("Column pointers must be nondecreasing and end at nnz")
        if np.any(self.rowind < self.colind):
            raise DimensionError("Only lower-triangle entries may be stored")
        for j in range(self.n):
            rows = self.rowind[self.colptr[j] : self.colptr[j + 1]]
            if rows.size > 1 and np.any(np.diff(rows) <= 0):
                raise DimensionError(f"Row indices of column {j} are not strictly increasing")
