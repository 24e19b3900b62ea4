"""
K1s: condensed system in the decision variables t only

    (W_t + Sigma_t + delta I + rho_hat J_E^T J_E + rho_hat J_I^T Omega J_I) dt = r_t + rho_hat J_I^T D M^{-1} r_s

with M = Sigma_s + delta + rho_hat D^2, Omega = (Sigma_s + delta) M^{-1} and -D the slack block
of the Jacobian. The slack step is ds = M^{-1} (rho_hat D J_I dt + r_s); dy and dr follow from
the eliminated rows.
"""

from typing import Tuple

import numpy as np

from .base import AssemblyPattern, KktSystem, NewtonStep, recover_bound_steps, recover_dr, triplet_blocks
from .context import KktContext, KktFormulation
from .k2 import hessian_triplets


class K1sSystem(KktSystem):
    formulation = KktFormulation.K1S

    def build_pattern(self) -> AssemblyPattern:
        v = self.view
        n_t = v.n_t
        # t-entries of every Jacobian row (slack entries come last in each row)
        t_entry = v.jac_indices < n_t
        pair_a, pair_b, pair_row = [], [], []
        for i in range(v.m):
            pos = np.arange(v.jac_indptr[i], v.jac_indptr[i + 1])
            pos = pos[t_entry[pos]]
            a, b = np.tril_indices(pos.size)
            pair_a.append(pos[a])
            pair_b.append(pos[b])
            pair_row.append(np.full(a.size, i, dtype=np.int64))
        empty = np.zeros(0, dtype=np.int64)
        self._pair_a = np.concatenate(pair_a) if pair_a else empty
        self._pair_b = np.concatenate(pair_b) if pair_b else empty
        self._pair_row = np.concatenate(pair_row) if pair_row else empty

        diag_t = np.arange(n_t, dtype=np.int64)
        h_rows, h_cols = hessian_triplets(v)
        keep = h_cols < n_t
        rows, cols = triplet_blocks(
            [
                (h_rows[keep], h_cols[keep]),
                (diag_t, diag_t),
                (v.jac_indices[self._pair_a], v.jac_indices[self._pair_b]),
            ]
        )
        self._hess_keep = keep
        return AssemblyPattern(n_t, rows, cols)

    # Pieces shared by assembly and recovery

    def _slack_system(self, ctx: KktContext) -> Tuple[np.ndarray, np.ndarray]:
        """M = Sigma_s + delta + rho_hat D^2 and r_s"""
        v = self.view
        d = v.slack_scale
        M = ctx.sigma_s + ctx.delta + ctx.rho_hat * d * d
        weighted = ctx.y_k - ctx.rho_hat * ctx.evaluation.constraints
        r_s = -d * weighted[v.m_e :] - ctx.barrier_gradient[v.n_t :]
        return M, r_s

    def _row_weights(self, ctx: KktContext) -> np.ndarray:
        w = np.full(self.view.m, ctx.rho_hat)
        w[self.view.m_e :] *= ctx.omega()
        return w

    def _t_jacobian(self, ctx: KktContext):
        return ctx.masked_jacobian[:, : self.view.n_t]

    def matrix_values(self, ctx: KktContext) -> np.ndarray:
        Jx = ctx.masked_jacobian.data
        jtj = self._row_weights(ctx)[self._pair_row] * Jx[self._pair_a] * Jx[self._pair_b]
        diag = np.where(ctx.bounds.fixed, 1.0, ctx.sigma + ctx.delta)[: self.view.n_t]
        return np.concatenate((ctx.masked_hessian_values[self._hess_keep], diag, jtj))

    def rhs(self, ctx: KktContext) -> np.ndarray:
        v = self.view
        Jt = self._t_jacobian(ctx)
        weighted = ctx.y_k - ctx.rho_hat * ctx.evaluation.constraints
        r_t = Jt.T @ weighted - ctx.evaluation.gradient[: v.n_t] - ctx.barrier_gradient[: v.n_t]
        M, r_s = self._slack_system(ctx)
        if v.m_i:
            r_t = r_t + ctx.rho_hat * (Jt[v.m_e :].T @ (v.slack_scale * r_s / M))
        return np.where(ctx.bounds.fixed[: v.n_t], 0.0, r_t)

    def target_inertia(self) -> Tuple[int, int, int]:
        return (self.view.n_t, 0, 0)

    def recover_full_step(self, ctx: KktContext, solution: np.ndarray) -> NewtonStep:
        v = self.view
        dt = solution
        M, r_s = self._slack_system(ctx)
        Jt = self._t_jacobian(ctx)
        ds = (ctx.rho_hat * v.slack_scale * (Jt[v.m_e :] @ dt) + r_s) / M
        dx = np.concatenate((dt, ds))
        dy = -ctx.rho_hat * (ctx.jacobian @ dx + ctx.evaluation.constraints) + ctx.y_k - ctx.w.y
        dr = recover_dr(ctx, dy)
        dz_l, dz_u = recover_bound_steps(ctx, dx)
        return NewtonStep(dx, dr, dy, dz_l, dz_u)
