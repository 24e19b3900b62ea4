"""
Up-looking LDL^T factorization with static pivoting

The elimination order is fixed by `analyze`; pivots smaller than pivot_eps in magnitude are
replaced by +/- pivot_eps (sign of the computed pivot, zero counts as positive) and counted.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve_triangular

from ..core.exceptions import DimensionError, FactorizationError
from .matrix import SparseSymMatrix
from .ordering import SymbolicFactorization

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LdlFactors:
    """P A P^T = L D L^T + E with E diagonal and nonzero only on perturbed pivots"""

    perm: np.ndarray
    L: sp.csc_matrix  # unit lower triangular, diagonal stored
    D: np.ndarray
    inertia: Tuple[int, int, int]
    n_perturbed: int
    pivot_eps: float

    @property
    def n(self) -> int:
        return int(self.D.size)

    @cached_property
    def _lower(self) -> sp.csr_matrix:
        return self.L.tocsr()

    @cached_property
    def _upper(self) -> sp.csr_matrix:
        return self.L.T.tocsr()

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Solve A x = b with the (possibly perturbed) factors"""
        b = np.asarray(b, dtype=float)
        if b.shape != (self.n,):
            raise DimensionError(f"Expected right-hand side of length {self.n}, got {b.shape}")
        if self.n == 0:
            return np.zeros(0)
        z = spsolve_triangular(self._lower, b[self.perm], lower=True)
        z = z / self.D
        w = spsolve_triangular(self._upper, z, lower=False)
        x = np.empty(self.n)
        x[self.perm] = w
        return x

    def reconstruct(self) -> np.ndarray:
        """Dense L D L^T (in permuted order); intended for diagnostics on small systems"""
        L = np.asarray(self.L.todense())
        return L @ np.diag(self.D) @ L.T


def inertia_of(D: np.ndarray) -> Tuple[int, int, int]:
    return (int(np.sum(D > 0)), int(np.sum(D < 0)), int(np.sum(D == 0)))


def factorize(sym: SymbolicFactorization, A: SparseSymMatrix, pivot_eps: float = 1e-10) -> LdlFactors:
    """
    Numeric factorization of A using the structure computed by `analyze`.

    Raises FactorizationError on overflow, or on an exact zero pivot when pivot_eps is 0.
    """
    if not sym.matches(A):
        raise DimensionError("Matrix pattern differs from the analyzed pattern")
    if pivot_eps < 0:
        raise ValueError("pivot_eps must be nonnegative")

    n = sym.n
    Lp = sym.Lp
    Li = np.empty(sym.lnz, dtype=np.int64)
    Lx = np.empty(sym.lnz)
    Lnz = np.zeros(n, dtype=np.int64)
    D = np.empty(n)
    y = np.zeros(n)
    values = A.data[sym.row_src]
    perturbed = 0

    for k in range(n):
        lo, hi = sym.row_ptr[k], sym.row_ptr[k + 1]
        y[sym.row_cols[lo:hi]] = values[lo:hi]
        d = y[k]
        y[k] = 0.0
        for j in sym.row_patterns[k]:
            yj = y[j]
            y[j] = 0.0
            p0 = Lp[j]
            p1 = p0 + Lnz[j]
            if p1 > p0:
                y[Li[p0:p1]] -= Lx[p0:p1] * yj
            lkj = yj / D[j]
            d -= lkj * yj
            Li[p1] = k
            Lx[p1] = lkj
            Lnz[j] += 1

        if not np.isfinite(d):
            raise FactorizationError(f"Non-finite pivot at step {k}")
        if abs(d) < pivot_eps:
            d = pivot_eps if d >= 0 else -pivot_eps
            perturbed += 1
        elif d == 0.0:
            raise FactorizationError(f"Zero pivot at step {k} with pivot_eps = 0")
        D[k] = d

    if not np.all(np.isfinite(Lx)):
        raise FactorizationError("Overflow in the factor L")

    strict = sp.csc_matrix((Lx, Li, Lp), shape=(n, n))
    L = (strict + sp.identity(n, format="csc")).tocsc()
    L.sort_indices()
    inertia = inertia_of(D)
    if perturbed:
        logger.debug(f"Factorization perturbed {perturbed} pivot(s) to +/-{pivot_eps:g}")
    return LdlFactors(
        perm=sym.perm,
        L=L,
        D=D,
        inertia=inertia,
        n_perturbed=perturbed,
        pivot_eps=pivot_eps,
    )
