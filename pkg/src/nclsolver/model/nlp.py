"""
NLP view of an NCO problem: x = (t, s), c(x) = [c_E(t); c_I(t) - s], l = (l_t, l_s), u = (u_t, u_s)

The view optionally carries scale factors: the objective is multiplied by obj_scale and every
constraint row by its con_scale entry. Slack bounds are never scaled, so the slack block of the
scaled Jacobian is -diag(con_scale[m_E:]).
"""

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp

from ..core.exceptions import DimensionError
from ..sparse.matrix import SparseSymMatrix
from .nco import DerivativeWorkspace, NcoProblem


@dataclass(frozen=True, eq=False)
class PointEvaluation:
    """Function values and first derivatives of the NLP view at one point"""

    x: np.ndarray
    objective: float
    gradient: np.ndarray
    constraints: np.ndarray
    jacobian: sp.csr_matrix

    @property
    def finite(self) -> bool:
        return bool(
            np.isfinite(self.objective)
            and np.all(np.isfinite(self.gradient))
            and np.all(np.isfinite(self.constraints))
        )


@dataclass(frozen=True, eq=False)
class NlpView:
    problem: NcoProblem
    obj_scale: float = 1.0
    con_scale: Optional[np.ndarray] = None

    @property
    def n_t(self) -> int:
        return self.problem.n_t

    @property
    def n_s(self) -> int:
        return self.problem.m_i

    @property
    def n(self) -> int:
        return self.n_t + self.n_s

    @property
    def m_e(self) -> int:
        return self.problem.m_e

    @property
    def m_i(self) -> int:
        return self.problem.m_i

    @property
    def m(self) -> int:
        return self.problem.m

    @cached_property
    def row_scale(self) -> np.ndarray:
        if self.con_scale is None:
            return np.ones(self.m)
        return np.asarray(self.con_scale, dtype=float)

    @property
    def slack_scale(self) -> np.ndarray:
        """Diagonal D of the slack Jacobian block (which equals -D)"""
        return self.row_scale[self.m_e :]

    @cached_property
    def lower(self) -> np.ndarray:
        return np.concatenate((self.problem.lower, self.problem.ineq_lower))

    @cached_property
    def upper(self) -> np.ndarray:
        return np.concatenate((self.problem.upper, self.problem.ineq_upper))

    def with_scaling(self, obj_scale: float, con_scale: np.ndarray) -> "NlpView":
        con_scale = np.asarray(con_scale, dtype=float)
        if con_scale.shape != (self.m,):
            raise DimensionError(f"Expected {self.m} constraint scale factors, got {con_scale.shape}")
        return replace(self, obj_scale=float(obj_scale), con_scale=con_scale)

    # Patterns

    @cached_property
    def _jacobian_layout(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        compiled = self.problem.compiled
        counts_t = np.diff(compiled.jac_indptr)
        has_slack = np.arange(self.m) >= self.m_e
        indptr = np.concatenate(([0], np.cumsum(counts_t + has_slack))).astype(np.int64)
        shift = np.repeat(indptr[:-1] - compiled.jac_indptr[:-1], counts_t)
        t_pos = shift + np.arange(compiled.jac_indices.size)
        slack_pos = indptr[1:][self.m_e :] - 1
        indices = np.empty(indptr[-1], dtype=np.int64)
        indices[t_pos] = compiled.jac_indices
        indices[slack_pos] = self.n_t + np.arange(self.m_i)
        t_rows = np.repeat(np.arange(self.m), counts_t)
        return indptr, indices, t_pos, slack_pos, t_rows

    @property
    def jac_indptr(self) -> np.ndarray:
        return self._jacobian_layout[0]

    @property
    def jac_indices(self) -> np.ndarray:
        return self._jacobian_layout[1]

    @cached_property
    def hess_colptr(self) -> np.ndarray:
        colptr_t = self.problem.compiled.hess_colptr
        return np.concatenate((colptr_t, np.full(self.n_s, colptr_t[-1], dtype=np.int64)))

    @property
    def hess_rowind(self) -> np.ndarray:
        return self.problem.compiled.hess_rowind

    # Evaluation

    def split(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionError(f"Expected x of length {self.n}, got shape {x.shape}")
        return x[: self.n_t], x[self.n_t :]

    def objective(self, x: np.ndarray) -> float:
        t, _ = self.split(x)
        return self.obj_scale * self.problem.compiled.objective(t)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        t, _ = self.split(x)
        g = np.zeros(self.n)
        g[: self.n_t] = self.obj_scale * self.problem.compiled.gradient(t)
        return g

    def constraints(self, x: np.ndarray) -> np.ndarray:
        t, s = self.split(x)
        c = self.problem.compiled.constraints(t)
        c[self.m_e :] -= s
        return self.row_scale * c

    def jacobian(self, x: np.ndarray, ws: Optional[DerivativeWorkspace] = None) -> sp.csr_matrix:
        t, _ = self.split(x)
        indptr, indices, t_pos, slack_pos, t_rows = self._jacobian_layout
        values_t = self.problem.compiled.jacobian_values(t)
        if ws is not None:
            ws.jac_values[:] = values_t
        data = np.empty(indices.size)
        data[t_pos] = values_t * self.row_scale[t_rows]
        data[slack_pos] = -self.slack_scale
        return sp.csr_matrix((data, indices, indptr), shape=(self.m, self.n))

    def hessian(
        self,
        x: np.ndarray,
        y: np.ndarray,
        ws: Optional[DerivativeWorkspace] = None,
        obj_factor: float = 1.0,
    ) -> SparseSymMatrix:
        """Hessian of obj_factor * phi(x) - y^T c(x) for the (scaled) view, n x n lower triangle"""
        t, _ = self.split(x)
        y = np.asarray(y, dtype=float)
        if y.shape != (self.m,):
            raise DimensionError(f"Expected y of length {self.m}, got shape {y.shape}")
        values = self.problem.compiled.hessian_values(t, y * self.row_scale, obj_factor * self.obj_scale)
        if ws is not None:
            ws.hess_values[:] = values
        return SparseSymMatrix(self.n, self.hess_colptr, self.hess_rowind, values)

    def evaluate(self, x: np.ndarray, ws: Optional[DerivativeWorkspace] = None) -> PointEvaluation:
        x = np.array(x, dtype=float)
        return PointEvaluation(
            x=x,
            objective=self.objective(x),
            gradient=self.gradient(x),
            constraints=self.constraints(x),
            jacobian=self.jacobian(x, ws),
        )

    def unscaled_objective(self, x: np.ndarray) -> float:
        t, _ = self.split(x)
        return self.problem.compiled.objective(t)


def to_nlp_form(p: NcoProblem) -> NlpView:
    """Unscaled NLP view with one slack per inequality row"""
    return NlpView(problem=p)
