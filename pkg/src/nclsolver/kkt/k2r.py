"""
K2r: stabilized system after eliminating dr, unknowns (dx, -dy)

    [ H + Sigma + delta I   J^T       ] [  dx ]     [ g_b                  ]
    [ J                     -theta I  ] [ -dy ] = - [ c - theta (y_k - y)  ]

with theta = 1 / rho_hat, and dr = theta (dy - y_k + y) - r recovered afterwards.
"""

from typing import Tuple

import numpy as np

from .base import AssemblyPattern, KktSystem, NewtonStep, recover_bound_steps, recover_dr, triplet_blocks
from .context import KktContext, KktFormulation
from .k2 import hessian_triplets, jacobian_triplets, primal_diagonal


class K2rSystem(KktSystem):
    formulation = KktFormulation.K2R

    def build_pattern(self) -> AssemblyPattern:
        v = self.view
        n, m = v.n, v.m
        diag_x = np.arange(n, dtype=np.int64)
        diag_y = n + np.arange(m, dtype=np.int64)
        rows, cols = triplet_blocks(
            [hessian_triplets(v), (diag_x, diag_x), jacobian_triplets(v, n), (diag_y, diag_y)]
        )
        return AssemblyPattern(n + m, rows, cols)

    def matrix_values(self, ctx: KktContext) -> np.ndarray:
        return np.concatenate(
            (
                ctx.masked_hessian_values,
                primal_diagonal(ctx),
                ctx.masked_jacobian.data,
                np.full(self.view.m, -ctx.theta),
            )
        )

    def rhs(self, ctx: KktContext) -> np.ndarray:
        second = ctx.evaluation.constraints - ctx.theta * (ctx.y_k - ctx.w.y)
        return -np.concatenate((ctx.barrier_stationarity, second))

    def target_inertia(self) -> Tuple[int, int, int]:
        return (self.view.n, self.view.m, 0)

    def recover_full_step(self, ctx: KktContext, solution: np.ndarray) -> NewtonStep:
        n = self.view.n
        dx = solution[:n]
        dy = -solution[n:]
        dr = recover_dr(ctx, dy)
        dz_l, dz_u = recover_bound_steps(ctx, dx)
        return NewtonStep(dx, dr, dy, dz_l, dz_u)
