"""
Fill-reducing ordering and elimination structure

Minimum degree on the explicit elimination graph, followed by the symbolic analysis of the
permuted matrix: elimination tree, row patterns of L (in topological order) and column counts.
"""

import heapq
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Set

import numpy as np

from .matrix import SparseSymMatrix

logger = logging.getLogger(__name__)


def adjacency(A: SparseSymMatrix) -> List[Set[int]]:
    """Undirected graph of the off-diagonal pattern"""
    adj: List[Set[int]] = [set() for _ in range(A.n)]
    for i, j in zip(A.rowind.tolist(), A.colind.tolist()):
        if i != j:
            adj[i].add(j)
            adj[j].add(i)
    return adj


def minimum_degree_ordering(A: SparseSymMatrix, first: Optional[Sequence[int]] = None) -> np.ndarray:
    """
    Return perm (new -> old) from greedy minimum degree elimination.

    Ties are broken by the smaller node index, so the result depends only on the pattern.
    Nodes listed in `first` are eliminated before all others, in the given order.
    """
    n = A.n
    adj = adjacency(A)
    eliminated = np.zeros(n, dtype=bool)
    order: List[int] = []

    def eliminate(v: int) -> List[int]:
        nbrs = adj[v]
        for u in nbrs:
            adj[u].discard(v)
            adj[u] |= nbrs
            adj[u].discard(u)
        touched = sorted(nbrs)
        adj[v] = set()
        eliminated[v] = True
        order.append(v)
        return touched

    for v in first or ():
        if not eliminated[v]:
            eliminate(int(v))

    heap = [(len(adj[v]), v) for v in range(n) if not eliminated[v]]
    heapq.heapify(heap)
    while heap:
        degree, v = heapq.heappop(heap)
        if eliminated[v] or degree != len(adj[v]):
            continue
        for u in eliminate(v):
            heapq.heappush(heap, (len(adj[u]), u))

    return np.asarray(order, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class SymbolicFactorization:
    """Ordering plus elimination structure, reusable for every matrix with the analyzed pattern"""

    n: int
    perm: np.ndarray  # new -> old
    pinv: np.ndarray  # old -> new
    parent: np.ndarray  # elimination tree of P A P^T
    row_ptr: np.ndarray  # rows of tril(P A P^T): entries row_ptr[k]:row_ptr[k+1]
    row_cols: np.ndarray  # column index (<= k) in the permuted matrix
    row_src: np.ndarray  # index into A.data of each permuted entry
    row_patterns: List[List[int]]  # pattern of L(k, :k) in topological order
    Lp: np.ndarray  # column pointers of strict L
    colptr: np.ndarray  # analyzed pattern of A, kept to check reuse
    rowind: np.ndarray

    @property
    def lnz(self) -> int:
        """Number of strictly-lower nonzeros in L"""
        return int(self.Lp[-1])

    def matches(self, A: SparseSymMatrix) -> bool:
        return (
            A.n == self.n
            and np.array_equal(A.colptr, self.colptr)
            and np.array_equal(A.rowind, self.rowind)
        )


def elimination_tree(n: int, row_ptr: np.ndarray, row_cols: np.ndarray) -> np.ndarray:
    """Elimination tree from the rows of the lower triangle (cs_etree with path compression)"""
    parent = np.full(n, -1, dtype=np.int64)
    ancestor = np.full(n, -1, dtype=np.int64)
    for k in range(n):
        for i in row_cols[row_ptr[k] : row_ptr[k + 1]].tolist():
            while i != -1 and i < k:
                inext = int(ancestor[i])
                ancestor[i] = k
                if inext == -1:
                    parent[i] = k
                i = inext
    return parent


def row_pattern(k: int, cols: Sequence[int], parent: np.ndarray, mark: np.ndarray) -> List[int]:
    """Pattern of L(k, :k) by climbing the elimination tree (cs_ereach); topologically ordered"""
    mark[k] = k
    chunks: List[List[int]] = []
    for i in cols:
        if i >= k:
            continue
        path = []
        while mark[i] != k:
            path.append(i)
            mark[i] = k
            i = int(parent[i])
        if path:
            chunks.append(path)
    return [node for chunk in reversed(chunks) for node in chunk]


def analyze(A: SparseSymMatrix, first: Optional[Sequence[int]] = None) -> SymbolicFactorization:
    """Order the pattern of A and compute the structure of its LDL^T factor"""
    n = A.n
    perm = minimum_degree_ordering(A, first=first)
    pinv = np.empty(n, dtype=np.int64)
    pinv[perm] = np.arange(n, dtype=np.int64)

    # Entries of tril(P A P^T) grouped by row
    a = pinv[A.rowind]
    b = pinv[A.colind]
    prow = np.maximum(a, b)
    pcol = np.minimum(a, b)
    order = np.lexsort((pcol, prow))
    row_cols = pcol[order]
    row_src = order.astype(np.int64)
    row_ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(row_ptr, prow + 1, 1)
    row_ptr = np.cumsum(row_ptr)

    parent = elimination_tree(n, row_ptr, row_cols)

    mark = np.full(n, -1, dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    patterns: List[List[int]] = []
    for k in range(n):
        pattern = row_pattern(k, row_cols[row_ptr[k] : row_ptr[k + 1]].tolist(), parent, mark)
        patterns.append(pattern)
        if pattern:
            np.add.at(counts, pattern, 1)
    Lp = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)

    logger.debug(f"Analyzed n={n} nnz(A)={A.nnz} nnz(L)={int(Lp[-1])}")
    return SymbolicFactorization(
        n=n,
        perm=perm,
        pinv=pinv,
        parent=parent,
        row_ptr=row_ptr,
        row_cols=row_cols,
        row_src=row_src,
        row_patterns=patterns,
        Lp=Lp,
        colptr=A.colptr.copy(),
        rowind=A.rowind.copy(),
    )
