"""
Gradient-based scaling at the starting point and least-squares initial duals
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from ..model import NcoProblem, NlpView, eval_gradient, eval_jacobian

logger = logging.getLogger(__name__)

SCALE_MIN = 1e-8
SCALE_TARGET = 1.0
DUAL_REGULARIZATION = 1e-8
DUAL_CLIP = 1e3


@dataclass(frozen=True, eq=False)
class ScaleFactors:
    obj: float
    con: np.ndarray

    @classmethod
    def identity(cls, m: int) -> "ScaleFactors":
        return cls(1.0, np.ones(m))


def _factor(gnorm: np.ndarray) -> np.ndarray:
    gnorm = np.asarray(gnorm, dtype=float)
    safe = np.where(gnorm > 0, gnorm, 1.0)
    raw = np.where(gnorm > 0, SCALE_TARGET / safe, 1.0)
    return np.maximum(SCALE_MIN, np.minimum(1.0, raw))


def compute_scaling(problem: NcoProblem, t0: np.ndarray) -> ScaleFactors:
    """sigma = max(1e-8, min(1, 1/|g|_inf)) for the objective and every constraint row"""
    g = eval_gradient(problem, t0)
    sigma_f = float(_factor(np.array([np.max(np.abs(g)) if g.size else 0.0]))[0])
    J = eval_jacobian(problem, t0)
    row_max = np.zeros(problem.m)
    if J.nnz:
        row_max = np.asarray(abs(J).max(axis=1).todense()).ravel()
    sigma_c = _factor(row_max)
    logger.debug(
        f"Scaling: sigma_f={sigma_f:.3e}, "
        f"sigma_c in [{sigma_c.min(initial=1):.3e}, {sigma_c.max(initial=1):.3e}]"
    )
    return ScaleFactors(sigma_f, sigma_c)


def init_duals(view: NlpView, x0: np.ndarray) -> np.ndarray:
    """y0 from (J J^T + 1e-8 I) y = J grad phi at x0, clipped to [-1e3, 1e3]"""
    if view.m == 0:
        return np.zeros(0)
    ev = view.evaluate(x0)
    J = ev.jacobian
    lhs = (J @ J.T + DUAL_REGULARIZATION * sp.identity(view.m)).tocsc()
    y = np.atleast_1d(spsolve(lhs, J @ ev.gradient))
    if not np.all(np.isfinite(y)):
        logger.warning("Least-squares duals are not finite; starting from y = 0")
        return np.zeros(view.m)
    return np.clip(y, -DUAL_CLIP, DUAL_CLIP)
