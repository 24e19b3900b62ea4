"""
NCL Module - Outer Augmented-Lagrangian Loop

Multiplier, penalty and barrier schedules, problem scaling and the NclSolver driver.
"""

from .state import (
    MU0,
    MU_MIN,
    RHO0,
    RHO_MAX,
    OuterState,
    eta_for,
    extrapolation_accepted,
    omega_for,
    outer_update,
)
from .scaling import ScaleFactors, compute_scaling, init_duals
from .solver import (
    ExtrapolationResult,
    NclSolver,
    OuterRecord,
    SolveReport,
    SolverOptions,
    SolveStatus,
    constraint_violation,
    solve,
)

__all__ = [
    "MU0",
    "MU_MIN",
    "RHO0",
    "RHO_MAX",
    "OuterState",
    "eta_for",
    "extrapolation_accepted",
    "omega_for",
    "outer_update",
    "ScaleFactors",
    "compute_scaling",
    "init_duals",
    "ExtrapolationResult",
    "NclSolver",
    "OuterRecord",
    "SolveReport",
    "SolverOptions",
    "SolveStatus",
    "constraint_violation",
    "solve",
]
