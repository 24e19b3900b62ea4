"""
Scalable nonconvex QPs

    min 1/2 t'Ht + g't   s.t.   A t = b,   lo <= t <= hi

with H = S - kappa A'A (S SPD, kappa > 0). H is indefinite but S on the null space of A, so the
problem is bounded on its feasible set and the equality-constrained KKT point is the global
minimizer. The box is placed around that point so no bound is active.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..core.exceptions import InvalidSizeError
from ..model import ModelBuilder, NcoProblem, quicksum
from .registry import Family, KnownOptimum, check_positive, register

KAPPA = 200.0


@dataclass(frozen=True)
class QpData:
    H: np.ndarray
    g: np.ndarray
    A: np.ndarray
    b: np.ndarray
    t_opt: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    @property
    def f_opt(self) -> float:
        t = self.t_opt
        return float(0.5 * t @ self.H @ t + self.g @ t)


def qp_data(n: int, m: int, seed: int) -> QpData:
    """Seed-deterministic data together with the dense KKT oracle solution"""
    rng = np.random.default_rng(seed)
    A = sp.random(m, n, density=min(1.0, 3.0 / n), random_state=rng, data_rvs=lambda k: rng.uniform(-1, 1, k))
    A = (A + sp.eye(m, n)).toarray()
    off = 0.25 * rng.uniform(-1.0, 1.0, n - 1)
    S = np.diag(1.0 + rng.random(n)) + np.diag(off, 1) + np.diag(off, -1)
    H = S - KAPPA * A.T @ A
    g = rng.uniform(-1.0, 1.0, n)
    b = rng.uniform(-1.0, 1.0, m)

    kkt = np.block([[H, A.T], [A, np.zeros((m, m))]])
    sol = np.linalg.solve(kkt, np.concatenate((-g, b)))
    t_opt = sol[:n]
    margin = 1.0 + np.abs(t_opt)
    return QpData(H, g, A, b, t_opt, t_opt - margin, t_opt + margin)


def _ncvxqp_optimum(n: int, m: int, seed: int) -> KnownOptimum:
    data = qp_data(n, m, seed)
    return KnownOptimum(data.f_opt, 1e-6 * max(1.0, abs(data.f_opt)), "dense KKT solve", tuple(data.t_opt))


@register(
    "ncvxqp",
    Family.NONCONVEX_QP,
    "random sparse indefinite QP, bounded on its equality-constrained feasible set",
    optimum=_ncvxqp_optimum,
)
def ncvxqp(n: int = 20, m: int = 8, seed: int = 0) -> NcoProblem:
    check_positive("ncvxqp", n=n, m=m)
    if m >= n:
        raise InvalidSizeError(f"ncvxqp: m={m} must be smaller than n={n}")
    data = qp_data(n, m, seed)
    mb = ModelBuilder(f"ncvxqp(n={n}, m={m}, seed={seed})")
    t = mb.add_variables(n, lower=data.lower, upper=data.upper, start=0.0)

    rows, cols = np.nonzero(np.triu(data.H))
    quad = [
        (0.5 * float(data.H[i, j]) * t[i] ** 2) if i == j else float(data.H[i, j]) * t[i] * t[j]
        for i, j in zip(rows, cols)
    ]
    mb.minimize(quicksum(quad) + quicksum(float(data.g[i]) * t[i] for i in range(n)))
    for i in range(m):
        nz = np.nonzero(data.A[i])[0]
        mb.add_equality(quicksum(float(data.A[i, j]) * t[j] for j in nz), rhs=float(data.b[i]))
    return mb.build()
