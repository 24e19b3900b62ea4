"""
Richardson iterative refinement on top of a static-pivoting factorization
"""

import logging
from dataclasses import dataclass

import numpy as np

from .ldl import LdlFactors
from .matrix import SparseSymMatrix

logger = logging.getLogger(__name__)

MAX_REFINEMENT_STEPS = 10
REFINEMENT_TOL = 1e-12
STAGNATION_FACTOR = 0.5


@dataclass(frozen=True, eq=False)
class RefinementResult:
    """Refined solution with its achieved residual"""

    x: np.ndarray
    residual: float  # ||b - A x||_inf / ||b||_inf (absolute when b = 0)
    abs_residual: float
    steps: int
    converged: bool


def _relative(abs_res: float, bnorm: float) -> float:
    return abs_res / bnorm if bnorm > 0 else abs_res


def solve_refined(
    factors: LdlFactors,
    A: SparseSymMatrix,
    b: np.ndarray,
    max_ref: int = MAX_REFINEMENT_STEPS,
    tol: float = REFINEMENT_TOL,
) -> RefinementResult:
    """
    x <- x + Solve(b - A x) until the relative residual reaches tol, the residual stagnates
    (reduction factor above 0.5 twice in a row) or max_ref corrections were applied.
    A correction that increases the residual is rejected and ends the iteration.
    """
    b = np.asarray(b, dtype=float)
    bnorm = float(np.max(np.abs(b))) if b.size else 0.0
    x = factors.solve(b)
    res_vec = b - A.matvec(x)
    abs_res = float(np.max(np.abs(res_vec))) if b.size else 0.0
    rel = _relative(abs_res, bnorm)

    steps = 0
    slow = 0
    while rel > tol and steps < max_ref:
        x_new = x + factors.solve(res_vec)
        new_vec = b - A.matvec(x_new)
        new_abs = float(np.max(np.abs(new_vec)))
        if not np.isfinite(new_abs) or new_abs >= abs_res:
            break
        slow = slow + 1 if new_abs > STAGNATION_FACTOR * abs_res else 0
        x, res_vec, abs_res = x_new, new_vec, new_abs
        rel = _relative(abs_res, bnorm)
        steps += 1
        if slow >= 2:
            logger.debug(f"Refinement stagnated after {steps} steps at residual {rel:.2e}")
            break

    return RefinementResult(x=x, residual=rel, abs_residual=abs_res, steps=steps, converged=rel <= tol)
