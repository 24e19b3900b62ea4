"""
NCL outer loop

Each outer iteration first tries one extrapolated Newton step on the next subproblem and keeps
it when the residual contracts enough; otherwise the subproblem is solved to omega_k by the
interior-point inner solver. The multiplier / penalty update then picks the success or failure
branch from the unscaled size of r; a subproblem that stalls without progress takes the
failure branch.
"""

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, List, Optional, Union

import numpy as np
import pandas as pd

from ..core.config import config
from ..core.exceptions import NclError, StepFailure
from ..ipm import (
    BarrierResidual,
    InteriorPointSolver,
    Iterate,
    IterationRecord,
    SubproblemStatus,
    clip_multipliers,
    initial_iterate,
    push_inside,
)
from ..kkt import BoundInfo, LinearSolverStats, get_kkt_system
from ..model import NcoProblem, NlpView, eval_constraints, to_nlp_form
from .scaling import ScaleFactors, compute_scaling, init_duals
from .state import MU0, RHO0, RHO_MAX, OuterState, extrapolation_accepted, outer_update

ACCEPTABLE_FACTOR = 100.0
MAX_STALLED_FAILURES = 3
INNER_TOL_FLOOR = 1e-2


class SolveStatus(Enum):
    """Final status of an NCL solve"""

    OPTIMAL = "optimal"
    ACCEPTABLE = "acceptable"
    INFEASIBLE = "locally-infeasible"
    ITERATION_LIMIT = "iteration-limit"
    STEP_FAILURE = "step-failure"


@dataclass
class SolverOptions:
    """Knobs of one solve; from_config() reads the NCL_* environment defaults"""

    kkt: str = "k2r"
    tol: float = 1e-8
    eta_target: Optional[float] = None
    omega_target: Optional[float] = None
    max_outer: int = 50
    max_inner: int = 1000
    max_inner_per_subproblem: int = 200
    pivot_eps: float = 1e-10
    scaling: bool = True
    dump_dir: Optional[str] = None
    rho0: float = RHO0
    mu0: float = MU0
    callback: Optional[Callable[[IterationRecord], None]] = None

    def __post_init__(self) -> None:
        self.kkt = str(self.kkt).lower()
        if self.tol <= 0:
            raise ValueError(f"Tolerance must be positive, got {self.tol}")
        if min(self.max_outer, self.max_inner, self.max_inner_per_subproblem) < 1:
            raise ValueError("Iteration limits must be at least 1")
        if self.rho0 <= 0 or not 0 < self.mu0 < 1:
            raise ValueError(f"Need rho0 > 0 and 0 < mu0 < 1, got rho0={self.rho0}, mu0={self.mu0}")

    @classmethod
    def from_config(cls, **overrides) -> "SolverOptions":
        values = dict(
            kkt=config.KKT_FORMULATION,
            tol=config.TOLERANCE,
            max_outer=config.MAX_OUTER,
            max_inner=config.MAX_INNER,
            max_inner_per_subproblem=config.MAX_INNER_PER_SUBPROBLEM,
            pivot_eps=config.PIVOT_EPS,
            scaling=config.SCALING,
            dump_dir=config.DUMP_DIR or None,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @property
    def eta_star(self) -> float:
        return self.eta_target if self.eta_target is not None else self.tol

    @property
    def omega_star(self) -> float:
        return self.omega_target if self.omega_target is not None else self.tol


@dataclass(frozen=True)
class OuterRecord:
    """One outer iteration; primal/dual residuals are in unscaled units"""

    k: int
    rho: float
    mu: float
    eta: float
    omega: float
    extrapolated: bool
    alpha: float
    residual_before: float
    residual_after: float
    subproblem: str
    inner_iterations: int
    primal_residual: float
    dual_residual: float
    branch: str

    COLUMNS = (
        "k",
        "rho",
        "mu",
        "eta",
        "omega",
        "extrapolated",
        "alpha",
        "residual_before",
        "residual_after",
        "subproblem",
        "inner_iterations",
        "primal_residual",
        "dual_residual",
        "branch",
    )

    def as_row(self) -> dict:
        return {name: getattr(self, name) for name in self.COLUMNS}


@dataclass(frozen=True, eq=False)
class ExtrapolationResult:
    accepted: bool
    w: Iterate
    alpha: float
    residual_before: float
    residual_after: float


@dataclass(eq=False)
class SolveReport:
    """Result of a solve in the units of the original model"""

    problem: str
    formulation: str
    status: SolveStatus
    t: np.ndarray
    s: np.ndarray
    y: np.ndarray
    z_l: np.ndarray
    z_u: np.ndarray
    objective: float
    primal_residual: float
    dual_residual: float
    constraint_violation: float
    rho: float
    mu: float
    outer_iterations: int
    inner_iterations: int
    solve_time: float
    scaling: ScaleFactors
    stats: LinearSolverStats = field(default_factory=LinearSolverStats)
    records: List[IterationRecord] = field(default_factory=list)
    outer_records: List[OuterRecord] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status in (SolveStatus.OPTIMAL, SolveStatus.ACCEPTABLE)

    def iteration_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.as_row() for r in self.records], columns=list(IterationRecord.COLUMNS))

    def outer_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.as_row() for r in self.outer_records], columns=list(OuterRecord.COLUMNS))

    def write_iterations(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.iteration_frame().to_csv(path, index=False)
        return path

    def summary(self) -> dict:
        return {
            "problem": self.problem,
            "kkt": self.formulation,
            "status": self.status.value,
            "objective": self.objective,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "constraint_violation": self.constraint_violation,
            "outer_iterations": self.outer_iterations,
            "inner_iterations": self.inner_iterations,
            "rho": self.rho,
            "mu": self.mu,
            "solve_time": self.solve_time,
            **self.stats.to_dict(),
        }


def constraint_violation(problem: NcoProblem, t: np.ndarray) -> float:
    """Max violation of the equalities, inequality ranges and variable bounds at t"""
    c_e, c_i = eval_constraints(problem, t)
    parts = [
        np.abs(c_e),
        np.maximum(problem.ineq_lower - c_i, 0.0),
        np.maximum(c_i - problem.ineq_upper, 0.0),
        np.maximum(problem.lower - t, 0.0),
        np.maximum(t - problem.upper, 0.0),
    ]
    return float(max((np.max(p) for p in parts if p.size), default=0.0))


class NclSolver:
    """Outer NCL loop around an InteriorPointSolver for one problem"""

    def __init__(self, problem: NcoProblem, options: Optional[SolverOptions] = None):
        self.problem = problem
        self.options = options or SolverOptions.from_config()
        self.logger = logging.getLogger("Ncl.solver")

        base = to_nlp_form(problem)
        self.bounds = BoundInfo.from_view(base)
        x0 = self._starting_point(base)
        if self.options.scaling:
            self.scale = compute_scaling(problem, x0[: base.n_t])
        else:
            self.scale = ScaleFactors.identity(problem.m)
        self.view: NlpView = base.with_scaling(self.scale.obj, self.scale.con)
        self.kkt = get_kkt_system(
            self.options.kkt, self.view, pivot_eps=self.options.pivot_eps, dump_dir=self.options.dump_dir
        )
        self.ipm = InteriorPointSolver(self.view, self.kkt, self.bounds, callback=self.options.callback)
        self.x0 = x0

    def _starting_point(self, base: NlpView) -> np.ndarray:
        """Default start pushed inside its bounds, slacks at c_I(t0) pushed inside their ranges"""
        n_t = base.n_t
        t0 = push_inside(np.concatenate([self.problem.default_start(), np.zeros(base.n_s)]), self.bounds)[:n_t]
        _, c_i = eval_constraints(self.problem, t0)
        return push_inside(np.concatenate([t0, c_i]), self.bounds)

    # Residual measures

    def unscaled_residuals(self, w: Iterate, F: BarrierResidual) -> tuple:
        """(|r / sigma_c|_inf, |stationarity / sigma_f|_inf) over free variables"""
        r = w.r / self.scale.con if w.r.size else w.r
        primal = float(np.max(np.abs(r))) if r.size else 0.0
        stat = F.stationarity[self.bounds.free]
        dual = float(np.max(np.abs(stat))) / self.scale.obj if stat.size else 0.0
        return primal, dual

    def extrapolation_step(self, w: Iterate, state: OuterState) -> ExtrapolationResult:
        """One Newton step on F_k from w_k, kept iff it contracts the residual enough"""
        try:
            attempt = self.ipm.newton_step(w, state.rho, state.y_k, state.mu)
        except StepFailure as e:
            self.logger.debug(f"Extrapolation step failed: {e}")
            return ExtrapolationResult(False, w, 0.0, np.inf, np.inf)

        F_before = attempt.residual.norm
        alpha = min(attempt.alpha_p, attempt.alpha_d)
        w_plus = w.moved(attempt.step, attempt.alpha_p, attempt.alpha_d)
        if not w_plus.is_finite():
            return ExtrapolationResult(False, w, alpha, F_before, np.inf)
        w_plus = clip_multipliers(w_plus, state.mu, self.bounds)
        with np.errstate(all="ignore"):
            F_plus = self.ipm.residual(w_plus, state.rho, state.y_k, state.mu)
        F_after = F_plus.norm if F_plus.is_finite else np.inf

        accepted = extrapolation_accepted(F_after, F_before, alpha, state.mu)
        if accepted:
            self.ipm.total_iterations += 1
            self.ipm.record(F_plus, state.rho, state.mu, attempt.step, attempt.alpha_p)
        return ExtrapolationResult(accepted, w_plus if accepted else w, alpha, F_before, F_after)

    # Main loop

    def solve(self) -> SolveReport:
        opts = self.options
        started = time.perf_counter()
        eta_star, omega_star = opts.eta_star, opts.omega_star

        y0 = init_duals(self.view, self.x0)
        state = OuterState.initial(y0, eta_star, omega_star, opts.rho0, opts.mu0)
        w = initial_iterate(self.view, self.bounds, self.x0, y0, state.mu)
        self.logger.info(
            f"Solving {self.problem.name} (n_t={self.problem.n_t}, m_e={self.problem.m_e}, "
            f"m_i={self.problem.m_i}) with {opts.kkt.upper()}"
        )

        outer_records: List[OuterRecord] = []
        status: Optional[SolveStatus] = None
        stalled = 0
        primal = dual = np.inf

        for k in range(opts.max_outer):
            if self.ipm.total_iterations >= opts.max_inner:
                self.logger.warning(f"Inner iteration limit of {opts.max_inner} reached")
                break
            self.ipm.k_outer = k
            inner_before = self.ipm.total_iterations

            try:
                ext = self.extrapolation_step(w, state)
                sub_status = "extrapolated"
                F_after = ext.residual_after
                no_progress = False
                if ext.accepted:
                    w = ext.w
                else:
                    omega_k = max(state.omega, INNER_TOL_FLOOR * omega_star * self.scale.obj)
                    budget = min(opts.max_inner_per_subproblem, opts.max_inner - self.ipm.total_iterations)
                    result = self.ipm.subproblem_solve(w, state.rho, state.y_k, state.mu, omega_k, budget)
                    w = result.w
                    F_after = result.residual.norm
                    sub_status = result.status.value
                    no_progress = not result.success and not result.progress
                F = self.ipm.residual(w, state.rho, state.y_k, state.mu)
            except NclError as e:
                self.logger.warning(f"outer {k}: {type(e).__name__}: {e}")
                status = SolveStatus.STEP_FAILURE
                break

            stalled = stalled + 1 if no_progress else 0
            primal, dual = self.unscaled_residuals(w, F)
            new_state = outer_update(state, w.r, violation=primal, stalled=no_progress)
            outer_records.append(
                OuterRecord(
                    k=k,
                    rho=state.rho,
                    mu=state.mu,
                    eta=state.eta,
                    omega=state.omega,
                    extrapolated=ext.accepted,
                    alpha=ext.alpha,
                    residual_before=ext.residual_before,
                    residual_after=F_after,
                    subproblem=sub_status,
                    inner_iterations=self.ipm.total_iterations - inner_before,
                    primal_residual=primal,
                    dual_residual=dual,
                    branch=new_state.branch or "",
                )
            )
            self.logger.info(
                f"outer {k}: |r|={primal:.2e} dual={dual:.2e} rho={state.rho:.1e} mu={state.mu:.1e} "
                f"{sub_status} -> {new_state.branch}"
            )

            # judged at the (rho, mu) that w was computed for
            if primal <= eta_star and dual <= omega_star and state.mu <= omega_star:
                status = SolveStatus.OPTIMAL
            elif state.rho >= RHO_MAX and primal > eta_star:
                status = SolveStatus.INFEASIBLE
            elif stalled >= MAX_STALLED_FAILURES:
                status = SolveStatus.STEP_FAILURE
            if status is not None:
                break
            state = new_state

        if status is None:
            near = primal <= ACCEPTABLE_FACTOR * eta_star and dual <= ACCEPTABLE_FACTOR * omega_star
            status = SolveStatus.ACCEPTABLE if near else SolveStatus.ITERATION_LIMIT

        report = self._report(w, state, status, outer_records, primal, dual, time.perf_counter() - started)
        self.logger.info(
            f"{self.problem.name}: {status.value} after {report.outer_iterations} outer / "
            f"{report.inner_iterations} inner iterations, objective {report.objective:.8g}"
        )
        return report

    def _report(
        self,
        w: Iterate,
        state: OuterState,
        status: SolveStatus,
        outer_records: List[OuterRecord],
        primal: float,
        dual: float,
        elapsed: float,
    ) -> SolveReport:
        n_t = self.view.n_t
        t, s = w.x[:n_t].copy(), w.x[n_t:].copy()
        return SolveReport(
            problem=self.problem.name,
            formulation=self.options.kkt,
            status=status,
            t=t,
            s=s,
            y=w.y * self.scale.con / self.scale.obj,
            z_l=w.z_l / self.scale.obj,
            z_u=w.z_u / self.scale.obj,
            objective=self.view.unscaled_objective(w.x),
            primal_residual=primal,
            dual_residual=dual,
            constraint_violation=constraint_violation(self.problem, t),
            rho=state.rho,
            mu=state.mu,
            outer_iterations=len(outer_records),
            inner_iterations=self.ipm.total_iterations,
            solve_time=elapsed,
            scaling=self.scale,
            stats=self.kkt.stats,
            records=list(self.ipm.records),
            outer_records=outer_records,
        )


def solve(problem: NcoProblem, options: Optional[SolverOptions] = None, **overrides) -> SolveReport:
    """Solve `problem`; keyword overrides are applied on top of the NCL_* configuration"""
    if options is None:
        options = SolverOptions.from_config(**overrides)
    elif overrides:
        raise ValueError("Pass either a SolverOptions instance or keyword overrides, not both")
    return NclSolver(problem, options).solve()
