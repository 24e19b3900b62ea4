"""
K2: symmetrized regularized system in (dx, dr, -dy)

    [ H + Sigma + delta I    0          J^T ] [  dx ]     [ g_b               ]
    [ 0                      rho_hat I  I   ] [  dr ] = - [ y_k + rho_hat r - y ]
    [ J                      I          0   ] [ -dy ]     [ c + r             ]
"""

from typing import Optional, Sequence, Tuple

import numpy as np

from ..model import NlpView
from .base import AssemblyPattern, KktSystem, NewtonStep, recover_bound_steps, triplet_blocks
from .context import KktContext, KktFormulation


def hessian_triplets(view: NlpView) -> Tuple[np.ndarray, np.ndarray]:
    cols = np.repeat(np.arange(view.n, dtype=np.int64), np.diff(view.hess_colptr))
    return view.hess_rowind, cols


def jacobian_triplets(view: NlpView, row_offset: int) -> Tuple[np.ndarray, np.ndarray]:
    rows = np.repeat(np.arange(view.m, dtype=np.int64), np.diff(view.jac_indptr))
    return row_offset + rows, view.jac_indices


def primal_diagonal(ctx: KktContext) -> np.ndarray:
    """Sigma + delta, and 1 on fixed variables"""
    return np.where(ctx.bounds.fixed, 1.0, ctx.sigma + ctx.delta)


class K2System(KktSystem):
    formulation = KktFormulation.K2

    def build_pattern(self) -> AssemblyPattern:
        v = self.view
        n, m = v.n, v.m
        diag_x = np.arange(n, dtype=np.int64)
        diag_r = n + np.arange(m, dtype=np.int64)
        diag_y = n + m + np.arange(m, dtype=np.int64)
        rows, cols = triplet_blocks(
            [
                hessian_triplets(v),
                (diag_x, diag_x),
                (diag_r, diag_r),
                jacobian_triplets(v, n + m),
                (diag_y, diag_r),
                (diag_y, diag_y),
            ]
        )
        return AssemblyPattern(n + 2 * m, rows, cols)

    def matrix_values(self, ctx: KktContext) -> np.ndarray:
        m = self.view.m
        return np.concatenate(
            (
                ctx.masked_hessian_values,
                primal_diagonal(ctx),
                np.full(m, ctx.rho_hat),
                ctx.masked_jacobian.data,
                np.ones(m),
                np.zeros(m),
            )
        )

    def rhs(self, ctx: KktContext) -> np.ndarray:
        return -np.concatenate((ctx.barrier_stationarity, ctx.r_block(), ctx.primal_block))

    def target_inertia(self) -> Tuple[int, int, int]:
        return (self.view.n + self.view.m, self.view.m, 0)

    def first_nodes(self) -> Optional[Sequence[int]]:
        n, m = self.view.n, self.view.m
        return list(range(n, n + m))

    def recover_full_step(self, ctx: KktContext, solution: np.ndarray) -> NewtonStep:
        n, m = self.view.n, self.view.m
        dx = solution[:n]
        dr = solution[n : n + m]
        dy = -solution[n + m :]
        dz_l, dz_u = recover_bound_steps(ctx, dx)
        return NewtonStep(dx, dr, dy, dz_l, dz_u)
