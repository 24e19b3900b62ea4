"""
NCO problems: objective f(t), equalities c_E(t) = 0, ranged inequalities l_s <= c_I(t) <= u_s
and bounds l_t <= t <= u_t
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from ..core.exceptions import DimensionError
from ..sparse.matrix import SparseSymMatrix
from .expr import Expr, Number, as_expr
from .tape import CompiledFunctions

logger = logging.getLogger(__name__)

INF = float("inf")


@dataclass(eq=False)
class DerivativeWorkspace:
    """Sparsity patterns of J = [J_E; J_I] and of the Lagrangian Hessian, plus value buffers"""

    jac_indptr: np.ndarray
    jac_indices: np.ndarray
    hess_colptr: np.ndarray
    hess_rowind: np.ndarray
    jac_values: np.ndarray = field(init=False)
    hess_values: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.jac_values = np.zeros(self.jac_indices.size)
        self.hess_values = np.zeros(self.hess_rowind.size)


@dataclass(frozen=True, eq=False)
class NcoProblem:
    """An immutable NCO model; share freely, give every solve its own workspace"""

    name: str
    n_t: int
    objective: Expr
    equalities: Tuple[Expr, ...]
    inequalities: Tuple[Expr, ...]
    ineq_lower: np.ndarray
    ineq_upper: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    start: Optional[np.ndarray]
    variable_names: Tuple[str, ...]
    compiled: CompiledFunctions

    @property
    def m_e(self) -> int:
        return len(self.equalities)

    @property
    def m_i(self) -> int:
        return len(self.inequalities)

    @property
    def m(self) -> int:
        return self.m_e + self.m_i

    def default_start(self) -> np.ndarray:
        """Supplied start where given, else midpoint of finite bounds, the finite bound, or 0"""
        lo, hi = self.lower, self.upper
        t0 = np.zeros(self.n_t)
        both = np.isfinite(lo) & np.isfinite(hi)
        t0[both] = 0.5 * (lo[both] + hi[both])
        only_lo = np.isfinite(lo) & ~np.isfinite(hi)
        only_hi = ~np.isfinite(lo) & np.isfinite(hi)
        t0[only_lo] = lo[only_lo]
        t0[only_hi] = hi[only_hi]
        if self.start is not None:
            given = np.isfinite(self.start)
            t0[given] = self.start[given]
        return t0

    def new_workspace(self) -> DerivativeWorkspace:
        return DerivativeWorkspace(
            jac_indptr=self.compiled.jac_indptr,
            jac_indices=self.compiled.jac_indices,
            hess_colptr=self.compiled.hess_colptr,
            hess_rowind=self.compiled.hess_rowind,
        )

    def summary(self) -> dict:
        return {
            "name": self.name,
            "n_t": self.n_t,
            "m_e": self.m_e,
            "m_i": self.m_i,
            "nnz_jac": int(self.compiled.jac_indices.size),
            "nnz_hess": int(self.compiled.hess_rowind.size),
        }


def _check_t(p: NcoProblem, t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.shape != (p.n_t,):
        raise DimensionError(f"Expected t of length {p.n_t}, got shape {t.shape}")
    return t


def eval_objective(p: NcoProblem, t: np.ndarray) -> float:
    return p.compiled.objective(_check_t(p, t))


def eval_constraints(p: NcoProblem, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    c = p.compiled.constraints(_check_t(p, t))
    return c[: p.m_e], c[p.m_e :]


def eval_gradient(p: NcoProblem, t: np.ndarray) -> np.ndarray:
    return p.compiled.gradient(_check_t(p, t))


def eval_jacobian(p: NcoProblem, t: np.ndarray, ws: Optional[DerivativeWorkspace] = None) -> sp.csr_matrix:
    """Jacobian of [c_E; c_I] as an m x n_t CSR matrix on the fixed pattern"""
    ws = ws or p.new_workspace()
    ws.jac_values[:] = p.compiled.jacobian_values(_check_t(p, t))
    return sp.csr_matrix(
        (ws.jac_values.copy(), ws.jac_indices, ws.jac_indptr), shape=(p.m, p.n_t)
    )


def eval_lag_hessian(
    p: NcoProblem,
    t: np.ndarray,
    y: np.ndarray,
    obj_scale: float = 1.0,
    ws: Optional[DerivativeWorkspace] = None,
) -> SparseSymMatrix:
    """obj_scale * Hess f - sum_i y_i Hess h_i, lower triangle on the declared pattern"""
    y = np.asarray(y, dtype=float)
    if y.shape != (p.m,):
        raise DimensionError(f"Expected y of length {p.m}, got shape {y.shape}")
    ws = ws or p.new_workspace()
    ws.hess_values[:] = p.compiled.hessian_values(_check_t(p, t), y, obj_scale)
    return SparseSymMatrix(p.n_t, ws.hess_colptr, ws.hess_rowind, ws.hess_values.copy())


class ModelBuilder:
    """Incrementally declare variables, objective and constraints, then build an NcoProblem"""

    def __init__(self, name: str = "model"):
        self.name = name
        self._names: List[str] = []
        self._prefix_counts: Dict[str, int] = {}
        self._lower: List[float] = []
        self._upper: List[float] = []
        self._start: List[float] = []
        self._objective: Expr = Expr.const(0.0)
        self._equalities: List[Expr] = []
        self._inequalities: List[Expr] = []
        self._ineq_lower: List[float] = []
        self._ineq_upper: List[float] = []

    @property
    def n_vars(self) -> int:
        return len(self._names)

    def add_variable(
        self,
        name: Optional[str] = None,
        lower: float = -INF,
        upper: float = INF,
        start: Optional[float] = None,
    ) -> Expr:
        lower = -INF if lower is None else float(lower)
        upper = INF if upper is None else float(upper)
        if lower > upper:
            raise ValueError(f"Variable {name or self.n_vars}: lower bound {lower} exceeds upper {upper}")
        index = self.n_vars
        self._names.append(name or f"t{index + 1}")
        self._lower.append(lower)
        self._upper.append(upper)
        self._start.append(np.nan if start is None else float(start))
        return Expr.var(index)

    def add_variables(
        self,
        count: int,
        lower: Union[float, Sequence[float]] = -INF,
        upper: Union[float, Sequence[float]] = INF,
        start: Union[None, float, Sequence[float]] = None,
        prefix: str = "t",
    ) -> List[Expr]:
        lows = np.broadcast_to(np.asarray(lower, dtype=float), (count,))
        ups = np.broadcast_to(np.asarray(upper, dtype=float), (count,))
        starts = np.broadcast_to(np.asarray(np.nan if start is None else start, dtype=float), (count,))
        base = self._prefix_counts.get(prefix, 0)
        self._prefix_counts[prefix] = base + count
        return [
            self.add_variable(
                f"{prefix}{base + k + 1}",
                lows[k],
                ups[k],
                None if np.isnan(starts[k]) else float(starts[k]),
            )
            for k in range(count)
        ]

    def minimize(self, objective: Union[Expr, Number]) -> None:
        self._objective = as_expr(objective)

    def add_equality(self, expr: Union[Expr, Number], rhs: float = 0.0) -> int:
        """Add expr = rhs; returns the equality row index"""
        self._equalities.append(as_expr(expr) - rhs if rhs else as_expr(expr))
        return len(self._equalities) - 1

    def add_inequality(
        self, expr: Union[Expr, Number], lower: Optional[float] = None, upper: Optional[float] = None
    ) -> int:
        """Add lower <= expr <= upper; returns the inequality row index"""
        lo = -INF if lower is None else float(lower)
        hi = INF if upper is None else float(upper)
        if lo > hi:
            raise ValueError(f"Inequality {len(self._inequalities)}: lower {lo} exceeds upper {hi}")
        self._inequalities.append(as_expr(expr))
        self._ineq_lower.append(lo)
        self._ineq_upper.append(hi)
        return len(self._inequalities) - 1

    def build(self) -> NcoProblem:
        n = self.n_vars
        compiled = CompiledFunctions(self._objective, self._equalities + self._inequalities, n)
        start = np.asarray(self._start, dtype=float)
        problem = NcoProblem(
            name=self.name,
            n_t=n,
            objective=self._objective,
            equalities=tuple(self._equalities),
            inequalities=tuple(self._inequalities),
            ineq_lower=np.asarray(self._ineq_lower, dtype=float),
            ineq_upper=np.asarray(self._ineq_upper, dtype=float),
            lower=np.asarray(self._lower, dtype=float),
            upper=np.asarray(self._upper, dtype=float),
            start=start if np.any(np.isfinite(start)) else None,
            variable_names=tuple(self._names),
            compiled=compiled,
        )
        logger.info(
            f"Built model {self.name}: n_t={n}, m_E={problem.m_e}, m_I={problem.m_i}, "
            f"nnz(J)={compiled.jac_indices.size}, nnz(W)={compiled.hess_rowind.size}"
        )
        return problem
