"""
Primal-dual iterates w = (x, r, y, z_l, z_u) and the barrier residual F of the NCL subproblem

    F = [ grad phi - J^T y - z_l + z_u ]
        [ y_k + rho r - y              ]
        [ c(x) + r                     ]
        [ Z_l (x - l) - mu             ]
        [ Z_u (u - x) - mu             ]
"""

from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, Optional

import numpy as np

from ..core.exceptions import DimensionError
from ..model import DerivativeWorkspace, NlpView, PointEvaluation

if TYPE_CHECKING:
    from ..kkt import BoundInfo, NewtonStep


@dataclass(eq=False)
class Iterate:
    x: np.ndarray
    r: np.ndarray
    y: np.ndarray
    z_l: np.ndarray
    z_u: np.ndarray

    def __post_init__(self) -> None:
        n, m = self.x.size, self.r.size
        if self.y.size != m or self.z_l.size != n or self.z_u.size != n:
            raise DimensionError(
                f"Inconsistent iterate blocks: x={n}, r={m}, y={self.y.size}, "
                f"z_l={self.z_l.size}, z_u={self.z_u.size}"
            )

    def copy(self) -> "Iterate":
        return Iterate(self.x.copy(), self.r.copy(), self.y.copy(), self.z_l.copy(), self.z_u.copy())

    def moved(self, step: "NewtonStep", alpha_p: float, alpha_d: float) -> "Iterate":
        """x, r and y move with alpha_p; bound multipliers with alpha_d"""
        return Iterate(
            self.x + alpha_p * step.dx,
            self.r + alpha_p * step.dr,
            self.y + alpha_p * step.dy,
            self.z_l + alpha_d * step.dz_l,
            self.z_u + alpha_d * step.dz_u,
        )

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(v)) for v in (self.x, self.r, self.y, self.z_l, self.z_u))


@dataclass(frozen=True, eq=False)
class BarrierResidual:
    stationarity: np.ndarray
    r_block: np.ndarray
    primal: np.ndarray
    comp_l: np.ndarray
    comp_u: np.ndarray

    def _inf(self, v: np.ndarray) -> float:
        return float(np.max(np.abs(v))) if v.size else 0.0

    @property
    def norm(self) -> float:
        return max(self.block_norms().values())

    @property
    def sq_norm(self) -> float:
        return float(sum(np.dot(v, v) for v in self.blocks()))

    def blocks(self):
        return (self.stationarity, self.r_block, self.primal, self.comp_l, self.comp_u)

    def block_norms(self) -> Dict[str, float]:
        return {
            "stationarity": self._inf(self.stationarity),
            "r_block": self._inf(self.r_block),
            "primal": self._inf(self.primal),
            "comp_l": self._inf(self.comp_l),
            "comp_u": self._inf(self.comp_u),
        }

    @property
    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(v)) for v in self.blocks())


def evaluate_point(view: NlpView, w: Iterate, ws: Optional[DerivativeWorkspace] = None) -> PointEvaluation:
    return view.evaluate(w.x, ws)


def residual(
    view: NlpView,
    w: Iterate,
    rho: float,
    y_k: np.ndarray,
    mu: float,
    bounds: "BoundInfo",
    evaluation: Optional[PointEvaluation] = None,
) -> BarrierResidual:
    """Five blocks of F at w; components of absent bounds and fixed variables are zero"""
    ev = evaluation if evaluation is not None else view.evaluate(w.x)
    gap_l, gap_u = bounds.gaps(w.x)
    stationarity = ev.gradient - ev.jacobian.T @ w.y - w.z_l + w.z_u
    return BarrierResidual(
        stationarity=np.where(bounds.fixed, 0.0, stationarity),
        r_block=y_k + rho * w.r - w.y,
        primal=ev.constraints + w.r,
        comp_l=np.where(bounds.has_lower, w.z_l * gap_l - mu, 0.0),
        comp_u=np.where(bounds.has_upper, w.z_u * gap_u - mu, 0.0),
    )


def barrier_objective(
    view: NlpView, w: Iterate, rho: float, y_k: np.ndarray, mu: float, bounds: "BoundInfo", objective: float
) -> float:
    """phi(x) + y_k^T r + rho/2 |r|^2 - mu sum log(x - l) - mu sum log(u - x)"""
    gap_l, gap_u = bounds.gaps(w.x)
    with np.errstate(invalid="ignore", divide="ignore"):
        logs = np.sum(np.log(gap_l[bounds.has_lower])) + np.sum(np.log(gap_u[bounds.has_upper]))
    return float(objective + y_k @ w.r + 0.5 * rho * (w.r @ w.r) - mu * logs)
