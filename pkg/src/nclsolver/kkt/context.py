"""
Data shared by every KKT formulation at one Newton step
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import TYPE_CHECKING, Optional

import numpy as np
import scipy.sparse as sp

from ..core.exceptions import DimensionError, NonInteriorIterateError
from ..model import NlpView, PointEvaluation
from ..sparse import SparseSymMatrix

if TYPE_CHECKING:
    from ..ipm.iterate import Iterate


class KktFormulation(Enum):
    """Which linear system the Newton step is computed from"""

    K2 = "k2"
    K2R = "k2r"
    K1S = "k1s"


@dataclass(frozen=True, eq=False)
class BoundInfo:
    """Bounds of x = (t, s) as the interior-point method sees them"""

    lower: np.ndarray
    upper: np.ndarray
    fixed: np.ndarray

    @classmethod
    def from_view(cls, view: NlpView) -> "BoundInfo":
        """Fixed t variables are pinned; degenerate slack ranges are relaxed by 1e-8 max(1, |l|)"""
        lower = view.lower.copy()
        upper = view.upper.copy()
        fixed = np.zeros(view.n, dtype=bool)
        fixed[: view.n_t] = lower[: view.n_t] == upper[: view.n_t]
        s = slice(view.n_t, view.n)
        degenerate = lower[s] == upper[s]
        eps = 1e-8 * np.maximum(1.0, np.abs(lower[s]))
        lower[s] = np.where(degenerate, lower[s] - eps, lower[s])
        upper[s] = np.where(degenerate, upper[s] + eps, upper[s])
        return cls(lower=lower, upper=upper, fixed=fixed)

    @cached_property
    def has_lower(self) -> np.ndarray:
        return np.isfinite(self.lower) & ~self.fixed

    @cached_property
    def has_upper(self) -> np.ndarray:
        return np.isfinite(self.upper) & ~self.fixed

    @cached_property
    def free(self) -> np.ndarray:
        return ~self.fixed

    def gaps(self, x: np.ndarray):
        """(x - l, u - x), set to 1 where the bound is absent"""
        gap_l = np.where(self.has_lower, x - np.where(self.has_lower, self.lower, 0.0), 1.0)
        gap_u = np.where(self.has_upper, np.where(self.has_upper, self.upper, 0.0) - x, 1.0)
        return gap_l, gap_u


@dataclass(eq=False)
class KktContext:
    """
    Iterate, outer parameters and derivatives at the current point.

    Derived quantities (Sigma, rho_hat, theta, Omega) follow delta: call `set_delta` before
    assembling with a new regularization.
    """

    view: NlpView
    w: "Iterate"
    evaluation: PointEvaluation
    hessian: SparseSymMatrix
    rho: float
    mu: float
    y_k: np.ndarray
    bounds: BoundInfo
    delta: float = 0.0
    _masked_jacobian: Optional[sp.csr_matrix] = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.rho <= 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if self.y_k.shape != (self.view.m,):
            raise DimensionError(f"Expected y_k of length {self.view.m}, got {self.y_k.shape}")
        self.check_interior()

    def check_interior(self) -> None:
        b = self.bounds
        x = self.w.x
        if np.any(x[b.has_lower] <= b.lower[b.has_lower]) or np.any(x[b.has_upper] >= b.upper[b.has_upper]):
            raise NonInteriorIterateError("Iterate is not strictly inside its bounds")
        if np.any(self.w.z_l[b.has_lower] <= 0) or np.any(self.w.z_u[b.has_upper] <= 0):
            raise NonInteriorIterateError("Bound multipliers must be positive on finite bounds")

    def set_delta(self, delta: float) -> None:
        self.delta = float(delta)

    # Parameters

    @property
    def rho_hat(self) -> float:
        return self.rho + self.delta

    @property
    def theta(self) -> float:
        return 1.0 / self.rho_hat

    @property
    def n(self) -> int:
        return self.view.n

    @property
    def m(self) -> int:
        return self.view.m

    # Barrier terms

    @cached_property
    def gaps(self):
        return self.bounds.gaps(self.w.x)

    @cached_property
    def sigma(self) -> np.ndarray:
        """Sigma = (X-L)^{-1} Z_l + (U-X)^{-1} Z_u on finite bounds"""
        gap_l, gap_u = self.gaps
        b = self.bounds
        return np.where(b.has_lower, self.w.z_l / gap_l, 0.0) + np.where(b.has_upper, self.w.z_u / gap_u, 0.0)

    @property
    def sigma_t(self) -> np.ndarray:
        return self.sigma[: self.view.n_t]

    @property
    def sigma_s(self) -> np.ndarray:
        return self.sigma[self.view.n_t :]

    @cached_property
    def barrier_gradient(self) -> np.ndarray:
        """-mu/(x-l) + mu/(u-x) on finite bounds"""
        gap_l, gap_u = self.gaps
        b = self.bounds
        return np.where(b.has_lower, -self.mu / gap_l, 0.0) + np.where(b.has_upper, self.mu / gap_u, 0.0)

    def omega(self) -> np.ndarray:
        """Omega = (Sigma_s + delta) / (Sigma_s + delta + rho_hat D^2); lies in [0, 1)"""
        sig = self.sigma_s + self.delta
        d = self.view.slack_scale
        return sig / (sig + self.rho_hat * d * d)

    # Derivatives with fixed variables removed

    @property
    def jacobian(self) -> sp.csr_matrix:
        return self.evaluation.jacobian

    @property
    def masked_jacobian(self) -> sp.csr_matrix:
        if self._masked_jacobian is None:
            J = self.evaluation.jacobian.copy()
            if np.any(self.bounds.fixed):
                J.data = np.where(self.bounds.fixed[J.indices], 0.0, J.data)
            self._masked_jacobian = J
        return self._masked_jacobian

    @cached_property
    def masked_hessian_values(self) -> np.ndarray:
        H = self.hessian
        fixed = self.bounds.fixed
        if not np.any(fixed):
            return H.data
        return np.where(fixed[H.rowind] | fixed[H.colind], 0.0, H.data)

    @cached_property
    def hessian_max(self) -> float:
        """||H + Sigma||_max over free variables"""
        diag = self.hessian.diagonal() + self.sigma
        off = np.abs(self.masked_hessian_values).max() if self.hessian.nnz else 0.0
        on = np.abs(diag[self.bounds.free]).max() if np.any(self.bounds.free) else 0.0
        return float(max(off, on))

    # Residual blocks of F

    @cached_property
    def stationarity(self) -> np.ndarray:
        """grad phi - J^T y - z_l + z_u; zero on fixed variables"""
        F1 = self.evaluation.gradient - self.jacobian.T @ self.w.y - self.w.z_l + self.w.z_u
        return np.where(self.bounds.fixed, 0.0, F1)

    @cached_property
    def barrier_stationarity(self) -> np.ndarray:
        """g_b = grad phi - J^T y - mu/(x-l) + mu/(u-x); zero on fixed variables"""
        g = self.evaluation.gradient - self.jacobian.T @ self.w.y + self.barrier_gradient
        return np.where(self.bounds.fixed, 0.0, g)

    def r_block(self) -> np.ndarray:
        """y_k + rho_hat r - y (equals the residual's second block when delta = 0)"""
        return self.y_k + self.rho_hat * self.w.r - self.w.y

    @property
    def primal_block(self) -> np.ndarray:
        return self.evaluation.constraints + self.w.r
