"""
IPM Module - Interior-Point Inner Solver

Newton iterations on the barrier residual of the NCL subproblem with fraction-to-boundary
and a filter line search.
"""

from .iterate import BarrierResidual, Iterate, barrier_objective, evaluate_point, residual
from .boundary import KAPPA_SIGMA, clip_multipliers, fraction_to_boundary, fraction_to_boundary_tau
from .linesearch import Filter, LineSearchResult, TrialPoint, line_search
from .solver import (
    InteriorPointSolver,
    IterationRecord,
    StepAttempt,
    SubproblemResult,
    SubproblemStatus,
    initial_iterate,
    push_inside,
)

__all__ = [
    "BarrierResidual",
    "Iterate",
    "barrier_objective",
    "evaluate_point",
    "residual",
    "KAPPA_SIGMA",
    "clip_multipliers",
    "fraction_to_boundary",
    "fraction_to_boundary_tau",
    "Filter",
    "LineSearchResult",
    "TrialPoint",
    "line_search",
    "InteriorPointSolver",
    "IterationRecord",
    "StepAttempt",
    "SubproblemResult",
    "SubproblemStatus",
    "initial_iterate",
    "push_inside",
]
