"""
Backtracking line search with a two-dimensional filter and an Armijo fallback on |F|^2
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

from .iterate import BarrierResidual, Iterate

logger = logging.getLogger(__name__)

GAMMA_THETA = 1e-5
GAMMA_PHI = 1e-5
ARMIJO = 1e-4
MAX_BACKTRACKS = 30


@dataclass
class Filter:
    """Pairs (theta, phi) of constraint violation and barrier objective that block future trials"""

    entries: List[Tuple[float, float]] = field(default_factory=list)
    gamma_theta: float = GAMMA_THETA
    gamma_phi: float = GAMMA_PHI

    def acceptable(self, theta: float, phi: float) -> bool:
        return all(
            theta < (1.0 - self.gamma_theta) * t or phi < p - self.gamma_phi * t for t, p in self.entries
        )

    def add(self, theta: float, phi: float) -> None:
        # drop entries the new one dominates
        self.entries = [(t, p) for t, p in self.entries if t < theta or p < phi]
        self.entries.append((theta, phi))


@dataclass(frozen=True, eq=False)
class TrialPoint:
    """A candidate iterate with everything the acceptance test and the next iteration need"""

    w: Iterate
    theta: float
    phi: float
    residual: BarrierResidual
    payload: object = None

    @property
    def finite(self) -> bool:
        return math.isfinite(self.theta) and math.isfinite(self.phi) and self.residual.is_finite


@dataclass(frozen=True, eq=False)
class LineSearchResult:
    accepted: bool
    alpha_p: float
    alpha_d: float
    backtracks: int
    trial: Optional[TrialPoint]
    by_filter: bool = False


def line_search(
    current: TrialPoint,
    alpha_p_max: float,
    alpha_d_max: float,
    make_trial: Callable[[float, float], TrialPoint],
    filt: Filter,
    max_backtracks: int = MAX_BACKTRACKS,
) -> LineSearchResult:
    """
    Try alpha = alpha_max 2^-j, j = 0..max_backtracks. A finite trial is accepted when the filter
    accepts it with sufficient decrease in theta or phi, or when |F+|^2 <= (1 - 1e-4 alpha)|F|^2.
    """
    theta, phi = current.theta, current.phi
    sq = current.residual.sq_norm
    for j in range(max_backtracks + 1):
        factor = 0.5**j
        alpha_p, alpha_d = alpha_p_max * factor, alpha_d_max * factor
        trial = make_trial(alpha_p, alpha_d)
        if not trial.finite:
            continue
        decrease = trial.theta <= (1.0 - GAMMA_THETA) * theta or trial.phi <= phi - GAMMA_PHI * theta
        if decrease and filt.acceptable(trial.theta, trial.phi):
            filt.add(theta, phi)
            return LineSearchResult(True, alpha_p, alpha_d, j, trial, by_filter=True)
        if trial.residual.sq_norm <= (1.0 - ARMIJO * alpha_p) * sq:
            return LineSearchResult(True, alpha_p, alpha_d, j, trial)
    logger.warning(f"Line search failed after {max_backtracks} backtracks (theta={theta:.2e}, |F|^2={sq:.2e})")
    return LineSearchResult(False, 0.0, 0.0, max_backtracks, None)
