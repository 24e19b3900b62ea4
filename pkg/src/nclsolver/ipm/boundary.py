"""
Fraction-to-boundary rule and bound-multiplier safeguard
"""

from typing import TYPE_CHECKING, Tuple

import numpy as np

from .iterate import Iterate

if TYPE_CHECKING:
    from ..kkt import BoundInfo, NewtonStep

KAPPA_SIGMA = 1e10


def fraction_to_boundary_tau(mu: float) -> float:
    return max(0.99, 1.0 - mu)


def _max_step(v: np.ndarray, dv: np.ndarray, tau: float) -> float:
    """Largest alpha in (0, 1] with v + alpha dv >= (1 - tau) v, for v > 0"""
    shrinking = dv < 0
    if not np.any(shrinking):
        return 1.0
    return float(min(1.0, np.min(-tau * v[shrinking] / dv[shrinking])))


def fraction_to_boundary(w: Iterate, step: "NewtonStep", tau: float, bounds: "BoundInfo") -> Tuple[float, float]:
    """Separate maximal primal and dual step sizes keeping gaps and multipliers interior"""
    gap_l, gap_u = bounds.gaps(w.x)
    lo, hi = bounds.has_lower, bounds.has_upper
    alpha_p = min(_max_step(gap_l[lo], step.dx[lo], tau), _max_step(gap_u[hi], -step.dx[hi], tau))
    alpha_d = min(_max_step(w.z_l[lo], step.dz_l[lo], tau), _max_step(w.z_u[hi], step.dz_u[hi], tau))
    return alpha_p, alpha_d


def clip_multipliers(w: Iterate, mu: float, bounds: "BoundInfo", kappa: float = KAPPA_SIGMA) -> Iterate:
    """Keep z within [mu / (kappa gap), kappa mu / gap] so that Sigma stays finite"""
    gap_l, gap_u = bounds.gaps(w.x)
    z_l = np.where(bounds.has_lower, np.clip(w.z_l, mu / (kappa * gap_l), kappa * mu / gap_l), 0.0)
    z_u = np.where(bounds.has_upper, np.clip(w.z_u, mu / (kappa * gap_u), kappa * mu / gap_u), 0.0)
    return Iterate(w.x, w.r, w.y, z_l, z_u)
