"""
Interior-point inner solver for the NCL subproblem

    min  phi(x) + y_k^T r + rho/2 |r|^2   s.t.   c(x) + r = 0,   l <= x <= u

Newton steps on F come from the active KKT formulation; fraction-to-boundary and a filter
line search keep iterates interior and globalize. mu is fixed inside a subproblem.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional

import numpy as np

from ..core.exceptions import StepFailure
from ..kkt import BoundInfo, KktContext, KktSystem, NewtonStep
from ..model import DerivativeWorkspace, NlpView, PointEvaluation
from .boundary import clip_multipliers, fraction_to_boundary, fraction_to_boundary_tau
from .iterate import BarrierResidual, Iterate, barrier_objective, residual
from .linesearch import Filter, LineSearchResult, TrialPoint, line_search

logger = logging.getLogger(__name__)


class SubproblemStatus(Enum):
    SUCCESS = "success"
    BUDGET_EXHAUSTED = "budget-exhausted"
    STEP_FAILURE = "step-failure"
    LINE_SEARCH_FAILURE = "line-search-failure"


@dataclass(frozen=True, eq=False)
class SubproblemResult:
    """Outcome of one subproblem; w is the accepted iterate on success, else the best one seen"""

    status: SubproblemStatus
    w: Iterate
    residual: BarrierResidual
    iterations: int
    progress: bool

    @property
    def success(self) -> bool:
        return self.status is SubproblemStatus.SUCCESS


@dataclass(frozen=True)
class IterationRecord:
    """One inner iteration, as written to the iteration CSV"""

    k_outer: int
    k_inner: int
    stationarity: float
    r_block: float
    primal: float
    comp_l: float
    comp_u: float
    mu: float
    rho: float
    delta: float
    alpha: float
    refinement_steps: int
    perturbed_pivots: int

    COLUMNS = (
        "k_outer",
        "k_inner",
        "stationarity",
        "r_block",
        "primal",
        "comp_l",
        "comp_u",
        "mu",
        "rho",
        "delta",
        "alpha",
        "refinement_steps",
        "perturbed_pivots",
    )

    def as_row(self) -> dict:
        return {name: getattr(self, name) for name in self.COLUMNS}


@dataclass(frozen=True, eq=False)
class StepAttempt:
    """A Newton step at w together with the data it was computed from"""

    step: NewtonStep
    context: KktContext
    residual: BarrierResidual
    alpha_p: float
    alpha_d: float


class InteriorPointSolver:
    """Owns the iterate buffers, the KKT system and the iteration log of one solve"""

    def __init__(
        self,
        view: NlpView,
        kkt: KktSystem,
        bounds: Optional[BoundInfo] = None,
        workspace: Optional[DerivativeWorkspace] = None,
        callback: Optional[Callable[[IterationRecord], None]] = None,
    ):
        self.view = view
        self.kkt = kkt
        self.bounds = bounds or BoundInfo.from_view(view)
        self.workspace = workspace or view.problem.new_workspace()
        self.callback = callback
        self.records: List[IterationRecord] = []
        self.total_iterations = 0
        self.k_outer = 0

    # Building blocks

    def evaluate(self, w: Iterate) -> PointEvaluation:
        return self.view.evaluate(w.x, self.workspace)

    def residual(self, w: Iterate, rho: float, y_k: np.ndarray, mu: float, ev: Optional[PointEvaluation] = None):
        return residual(self.view, w, rho, y_k, mu, self.bounds, ev if ev is not None else self.evaluate(w))

    def newton_step(
        self, w: Iterate, rho: float, y_k: np.ndarray, mu: float, ev: Optional[PointEvaluation] = None
    ) -> StepAttempt:
        """One Newton step on F at w with its fraction-to-boundary step sizes; may raise StepFailure"""
        ev = ev if ev is not None else self.evaluate(w)
        hessian = self.view.hessian(w.x, w.y, self.workspace)
        ctx = KktContext(self.view, w, ev, hessian, rho, mu, y_k, self.bounds)
        step = self.kkt.solve_with_inertia_correction(ctx)
        step.dx[self.bounds.fixed] = 0.0
        alpha_p, alpha_d = fraction_to_boundary(w, step, fraction_to_boundary_tau(mu), self.bounds)
        F = residual(self.view, w, rho, y_k, mu, self.bounds, ev)
        return StepAttempt(step, ctx, F, alpha_p, alpha_d)

    def trial_point(
        self, w: Iterate, step: NewtonStep, alpha_p: float, alpha_d: float, rho: float, y_k: np.ndarray, mu: float
    ) -> TrialPoint:
        moved = w.moved(step, alpha_p, alpha_d)
        if not moved.is_finite():
            return TrialPoint(moved, np.inf, np.inf, _infinite_residual(self.view))
        moved = clip_multipliers(moved, mu, self.bounds)
        return self._as_trial(moved, rho, y_k, mu)

    def _as_trial(self, w: Iterate, rho: float, y_k: np.ndarray, mu: float) -> TrialPoint:
        with np.errstate(all="ignore"):
            ev = self.evaluate(w)
            F = residual(self.view, w, rho, y_k, mu, self.bounds, ev)
            theta = float(np.sum(np.abs(ev.constraints + w.r)))
            phi = barrier_objective(self.view, w, rho, y_k, mu, self.bounds, ev.objective)
        return TrialPoint(w, theta, phi, F, payload=ev)

    def record(self, F: BarrierResidual, rho: float, mu: float, step: NewtonStep, alpha: float) -> None:
        norms = F.block_norms()
        record = IterationRecord(
            k_outer=self.k_outer,
            k_inner=self.total_iterations,
            mu=mu,
            rho=rho,
            delta=step.delta,
            alpha=alpha,
            refinement_steps=step.refinement_steps,
            perturbed_pivots=step.perturbed_pivots,
            **norms,
        )
        self.records.append(record)
        if self.callback is not None:
            self.callback(record)

    # Subproblem

    def subproblem_solve(
        self,
        w_start: Iterate,
        rho: float,
        y_k: np.ndarray,
        mu: float,
        omega: float,
        budget: int,
    ) -> SubproblemResult:
        """Newton iterations until |F|_inf <= omega or the iteration budget is spent"""
        current = self._as_trial(w_start, rho, y_k, mu)
        start_norm = current.residual.norm
        best = current
        filt = Filter()

        for it in range(budget + 1):
            F = current.residual
            if F.norm <= omega:
                logger.debug(f"Subproblem converged in {it} iterations: |F|={F.norm:.2e} <= {omega:.2e}")
                return SubproblemResult(SubproblemStatus.SUCCESS, current.w, F, it, True)
            if it == budget:
                break

            try:
                attempt = self.newton_step(current.w, rho, y_k, mu, current.payload)
            except StepFailure as e:
                logger.warning(f"Subproblem aborted at iteration {it}: {e}")
                return self._failure(SubproblemStatus.STEP_FAILURE, best, it, start_norm)

            ls: LineSearchResult = line_search(
                current,
                attempt.alpha_p,
                attempt.alpha_d,
                lambda ap, ad: self.trial_point(current.w, attempt.step, ap, ad, rho, y_k, mu),
                filt,
            )
            if not ls.accepted or ls.trial is None:
                return self._failure(SubproblemStatus.LINE_SEARCH_FAILURE, best, it, start_norm)

            current = ls.trial
            self.total_iterations += 1
            self.record(current.residual, rho, mu, attempt.step, ls.alpha_p)
            logger.debug(
                f"inner {self.total_iterations}: |F|={current.residual.norm:.3e} alpha=({ls.alpha_p:.3f}, "
                f"{ls.alpha_d:.3f}) delta={attempt.step.delta:.1e} backtracks={ls.backtracks}"
            )
            if current.residual.norm < best.residual.norm:
                best = current

        logger.warning(f"Subproblem budget of {budget} iterations exhausted at |F|={best.residual.norm:.2e}")
        return self._failure(SubproblemStatus.BUDGET_EXHAUSTED, best, budget, start_norm)

    @staticmethod
    def _failure(status: SubproblemStatus, best: TrialPoint, iterations: int, start_norm: float) -> SubproblemResult:
        return SubproblemResult(status, best.w, best.residual, iterations, best.residual.norm < start_norm)


def _infinite_residual(view: NlpView) -> BarrierResidual:
    inf_n, inf_m = np.full(view.n, np.inf), np.full(view.m, np.inf)
    return BarrierResidual(inf_n, inf_m, inf_m, inf_n, inf_n)


def push_inside(x0: np.ndarray, bounds: BoundInfo) -> np.ndarray:
    """Move x0 strictly inside its bounds; fixed entries sit on their value"""
    x = np.asarray(x0, dtype=float).copy()
    lo = np.where(bounds.has_lower, bounds.lower, 0.0)
    hi = np.where(bounds.has_upper, bounds.upper, 0.0)
    width = np.where(bounds.has_lower & bounds.has_upper, hi - lo, np.inf)
    push_l = np.minimum(np.where(bounds.has_lower, 1e-2 * np.maximum(1.0, np.abs(lo)), 0.0), 1e-2 * width)
    push_u = np.minimum(np.where(bounds.has_upper, 1e-2 * np.maximum(1.0, np.abs(hi)), 0.0), 1e-2 * width)
    x = np.where(bounds.has_lower, np.maximum(x, lo + push_l), x)
    x = np.where(bounds.has_upper, np.minimum(x, hi - push_u), x)
    return np.where(bounds.fixed, bounds.lower, x)


def initial_iterate(
    view: NlpView, bounds: BoundInfo, x0: np.ndarray, y0: np.ndarray, mu: float
) -> Iterate:
    """Push x0 strictly inside its bounds, set r = 0, y = y0 and z = mu / gap"""
    x = push_inside(x0, bounds)
    gap_l, gap_u = bounds.gaps(x)
    return Iterate(
        x=x,
        r=np.zeros(view.m),
        y=np.asarray(y0, dtype=float).copy(),
        z_l=np.where(bounds.has_lower, mu / gap_l, 0.0),
        z_u=np.where(bounds.has_upper, mu / gap_u, 0.0),
    )
