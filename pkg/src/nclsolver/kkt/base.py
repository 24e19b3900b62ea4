"""
Base KKT system: fixed-pattern assembly, inertia-corrected factorization and step recovery
"""

import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.exceptions import FactorizationError, StepFailure
from ..model import NlpView
from ..sparse import (
    LdlFactors,
    SparseSymMatrix,
    SymbolicFactorization,
    analyze,
    dump_matrix,
    factorize,
    solve_refined,
)
from .context import KktContext, KktFormulation

DELTA_MAX = 1e40
DELTA_MIN = 1e-20
DELTA_FIRST = 1e-8
DELTA_GROWTH = 8.0
DELTA_WARM_DIVISOR = 3.0
ACCEPT_RESIDUAL = 1e-8


class AssemblyPattern:
    """
    Lower-triangle pattern built once from (row, col) triplets; values are supplied per
    assembly in the same triplet order and duplicates are summed.
    """

    def __init__(self, n: int, rows: np.ndarray, cols: np.ndarray):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        lo = np.maximum(rows, cols)
        hi = np.minimum(rows, cols)
        unique, self.inverse = np.unique(hi * n + lo, return_inverse=True)
        self.n = n
        self.n_triplets = rows.size
        self.rowind = (unique % n).astype(np.int64) if n else unique
        colptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(colptr, (unique // n if n else unique) + 1, 1)
        self.colptr = np.cumsum(colptr)

    def assemble(self, values: np.ndarray) -> SparseSymMatrix:
        data = np.bincount(self.inverse, weights=values, minlength=self.rowind.size)
        return SparseSymMatrix(self.n, self.colptr, self.rowind, data)


@dataclass
class LinearSolverStats:
    """Counters and wall time spent in the linear solver"""

    analyses: int = 0
    factorizations: int = 0
    refinement_steps: int = 0
    perturbed_pivots: int = 0
    delta_trials: int = 0
    step_failures: int = 0
    time_analyze: float = 0.0
    time_factorize: float = 0.0
    time_solve: float = 0.0

    @property
    def total_time(self) -> float:
        return self.time_analyze + self.time_factorize + self.time_solve

    def to_dict(self) -> Dict[str, float]:
        return {
            "analyses": self.analyses,
            "factorizations": self.factorizations,
            "refinement_steps": self.refinement_steps,
            "perturbed_pivots": self.perturbed_pivots,
            "delta_trials": self.delta_trials,
            "step_failures": self.step_failures,
            "time_analyze": self.time_analyze,
            "time_factorize": self.time_factorize,
            "time_solve": self.time_solve,
            "time_linear": self.total_time,
        }


@dataclass(eq=False)
class NewtonStep:
    """Full primal-dual direction together with the diagnostics of the solve that produced it"""

    dx: np.ndarray
    dr: np.ndarray
    dy: np.ndarray
    dz_l: np.ndarray
    dz_u: np.ndarray
    delta: float = 0.0
    attempts: int = 1
    refinement_steps: int = 0
    residual: float = 0.0
    perturbed_pivots: int = 0
    inertia: Tuple[int, int, int] = (0, 0, 0)

    def scaled(self, alpha_p: float, alpha_d: float) -> "NewtonStep":
        return NewtonStep(
            self.dx * alpha_p,
            self.dr * alpha_p,
            self.dy * alpha_p,
            self.dz_l * alpha_d,
            self.dz_u * alpha_d,
            self.delta,
            self.attempts,
            self.refinement_steps,
            self.residual,
            self.perturbed_pivots,
            self.inertia,
        )

    def max_abs(self) -> float:
        parts = [self.dx, self.dr, self.dy, self.dz_l, self.dz_u]
        return float(max((np.max(np.abs(p)) for p in parts if p.size), default=0.0))


def recover_bound_steps(ctx: KktContext, dx: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """dz_l = -(Z_l dx - mu)/(x-l) - z_l,  dz_u = (Z_u dx + mu)/(u-x) - z_u; zero on absent bounds"""
    gap_l, gap_u = ctx.gaps
    b = ctx.bounds
    w = ctx.w
    dz_l = np.where(b.has_lower, -(w.z_l * dx - ctx.mu) / gap_l - w.z_l, 0.0)
    dz_u = np.where(b.has_upper, (w.z_u * dx + ctx.mu) / gap_u - w.z_u, 0.0)
    return dz_l, dz_u


def recover_dr(ctx: KktContext, dy: np.ndarray) -> np.ndarray:
    """dr = theta (dy - y_k + y) - r"""
    return ctx.theta * (dy - ctx.y_k + ctx.w.y) - ctx.w.r


def k3_residual(ctx: KktContext, step: NewtonStep) -> float:
    """Max-norm residual of the (delta-regularized) unsymmetric Newton system on F"""
    w = ctx.w
    b = ctx.bounds
    J = ctx.jacobian
    gap_l, gap_u = ctx.gaps
    H = ctx.hessian

    R1 = H.matvec(step.dx) + ctx.delta * step.dx - J.T @ step.dy - step.dz_l + step.dz_u + ctx.stationarity
    R1 = np.where(b.fixed, step.dx, R1)
    R2 = ctx.rho_hat * step.dr - step.dy + ctx.r_block()
    R3 = J @ step.dx + step.dr + ctx.primal_block
    F4 = w.z_l * gap_l - ctx.mu
    F5 = w.z_u * gap_u - ctx.mu
    R4 = np.where(b.has_lower, w.z_l * step.dx + gap_l * step.dz_l + F4, step.dz_l)
    R5 = np.where(b.has_upper, -w.z_u * step.dx + gap_u * step.dz_u + F5, step.dz_u)
    blocks = [R1, R2, R3, R4, R5]
    return float(max((np.max(np.abs(r)) for r in blocks if r.size), default=0.0))


class KktSystem(ABC):
    """
    One KKT formulation bound to an NLP view. Patterns are fixed at construction, so the
    symbolic factorization is computed once and reused for every Newton step.
    """

    formulation: KktFormulation

    def __init__(
        self,
        view: NlpView,
        pivot_eps: float = 1e-10,
        dump_dir: Optional[str] = None,
        max_refinement: int = 10,
    ):
        self.view = view
        self.pivot_eps = pivot_eps
        self.dump_dir = Path(dump_dir) if dump_dir else None
        self.max_refinement = max_refinement
        self.stats = LinearSolverStats()
        self.last_delta = 0.0
        self.logger = logging.getLogger(f"Kkt.{self.formulation.value}")
        self._symbolic: Optional[SymbolicFactorization] = None
        self._pattern = self.build_pattern()
        if self.dump_dir is not None:
            self.dump_dir.mkdir(parents=True, exist_ok=True)

    # Formulation-specific pieces

    @abstractmethod
    def build_pattern(self) -> AssemblyPattern:
        """Triplet structure of the assembled matrix"""

    @abstractmethod
    def matrix_values(self, ctx: KktContext) -> np.ndarray:
        """Values in triplet order for the current context (delta included)"""

    @abstractmethod
    def rhs(self, ctx: KktContext) -> np.ndarray:
        pass

    @abstractmethod
    def target_inertia(self) -> Tuple[int, int, int]:
        pass

    @abstractmethod
    def recover_full_step(self, ctx: KktContext, solution: np.ndarray) -> NewtonStep:
        """Full step from the solution of the assembled system"""

    def first_nodes(self) -> Optional[Sequence[int]]:
        """Nodes eliminated before minimum degree takes over"""
        return None

    # Shared machinery

    @property
    def dimension(self) -> int:
        return self._pattern.n

    def assemble(self, ctx: KktContext) -> Tuple[SparseSymMatrix, np.ndarray]:
        return self._pattern.assemble(self.matrix_values(ctx)), self.rhs(ctx)

    def _symbolic_for(self, K: SparseSymMatrix) -> SymbolicFactorization:
        if self._symbolic is None or not self._symbolic.matches(K):
            start = time.perf_counter()
            self._symbolic = analyze(K, first=self.first_nodes())
            self.stats.time_analyze += time.perf_counter() - start
            self.stats.analyses += 1
            self.logger.debug(f"Analyzed {K.n}x{K.n} system: nnz(K)={K.nnz}, nnz(L)={self._symbolic.lnz}")
        return self._symbolic

    def _dump(self, K: SparseSymMatrix) -> None:
        if self.dump_dir is None:
            return
        name = f"{self.view.problem.name}_{self.formulation.value}_{self.stats.factorizations:05d}.mtx"
        dump_matrix(K, self.dump_dir / _safe_filename(name))

    def delta_schedule(self, ctx: KktContext):
        """0, then a warm or cold start, then growth by 8 until delta_max"""
        yield 0.0
        if self.last_delta > 0:
            delta = max(DELTA_MIN, self.last_delta / DELTA_WARM_DIVISOR)
        else:
            delta = DELTA_FIRST * max(1.0, ctx.hessian_max)
        while delta <= DELTA_MAX:
            yield delta
            delta *= DELTA_GROWTH

    def try_delta(self, ctx: KktContext, delta: float) -> Optional[Tuple[np.ndarray, LdlFactors, int, float]]:
        """Factorize and solve at one delta; None when the inertia or the residual is unacceptable"""
        ctx.set_delta(delta)
        K, rhs = self.assemble(ctx)
        symbolic = self._symbolic_for(K)
        self._dump(K)

        start = time.perf_counter()
        try:
            factors = factorize(symbolic, K, self.pivot_eps)
        except FactorizationError as e:
            self.logger.debug(f"delta={delta:.2e}: factorization failed ({e})")
            return None
        finally:
            self.stats.time_factorize += time.perf_counter() - start
            self.stats.factorizations += 1
        self.stats.perturbed_pivots += factors.n_perturbed

        if factors.inertia != self.target_inertia():
            self.logger.debug(f"delta={delta:.2e}: inertia {factors.inertia}, want {self.target_inertia()}")
            return None

        start = time.perf_counter()
        refined = solve_refined(factors, K, rhs, max_ref=self.max_refinement)
        self.stats.time_solve += time.perf_counter() - start
        self.stats.refinement_steps += refined.steps

        bound = ACCEPT_RESIDUAL * max(1.0, float(np.max(np.abs(rhs))) if rhs.size else 0.0)
        if not np.isfinite(refined.abs_residual) or refined.abs_residual > bound:
            self.logger.debug(
                f"delta={delta:.2e}: refined residual {refined.abs_residual:.2e} above {bound:.2e} "
                f"({factors.n_perturbed} perturbed pivots)"
            )
            return None
        return refined.x, factors, refined.steps, refined.residual

    def solve_with_inertia_correction(self, ctx: KktContext) -> NewtonStep:
        """Newton step with inertia correction; raises StepFailure beyond delta_max"""
        attempts = 0
        delta = 0.0
        for delta in self.delta_schedule(ctx):
            attempts += 1
            self.stats.delta_trials += 1
            outcome = self.try_delta(ctx, delta)
            if outcome is None:
                continue
            solution, factors, steps, residual = outcome
            step = self.recover_full_step(ctx, solution)
            step.delta = delta
            step.attempts = attempts
            step.refinement_steps = steps
            step.residual = residual
            step.perturbed_pivots = factors.n_perturbed
            step.inertia = factors.inertia
            self.last_delta = delta
            if delta > 0:
                self.logger.debug(f"Accepted delta={delta:.2e} after {attempts} trials")
            return step

        self.stats.step_failures += 1
        self.logger.warning(f"Inertia correction failed: delta exceeded {DELTA_MAX:.0e} after {attempts} trials")
        raise StepFailure(f"{self.formulation.value}: no acceptable step below delta_max", delta, attempts)


def _safe_filename(name: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_.=" else "_" for ch in name)


def triplet_blocks(blocks: List[Tuple[np.ndarray, np.ndarray]]) -> Tuple[np.ndarray, np.ndarray]:
    rows = np.concatenate([b[0] for b in blocks]) if blocks else np.zeros(0, dtype=np.int64)
    cols = np.concatenate([b[1] for b in blocks]) if blocks else np.zeros(0, dtype=np.int64)
    return rows, cols
