"""
KKT Module - Newton Systems for the NCL Subproblem

Three formulations of the same regularized Newton step: K2 (full symmetrized), K2r (dr
eliminated) and K1s (condensed onto the decision variables).
"""

from typing import Dict, Type, Union

from ..model import NlpView
from .context import BoundInfo, KktContext, KktFormulation
from .base import (
    DELTA_MAX,
    AssemblyPattern,
    KktSystem,
    LinearSolverStats,
    NewtonStep,
    k3_residual,
    recover_bound_steps,
    recover_dr,
)
from .k2 import K2System
from .k2r import K2rSystem
from .k1s import K1sSystem

KKT_REGISTRY: Dict[KktFormulation, Type[KktSystem]] = {
    KktFormulation.K2: K2System,
    KktFormulation.K2R: K2rSystem,
    KktFormulation.K1S: K1sSystem,
}


def get_kkt_system(formulation: Union[str, KktFormulation], view: NlpView, **kwargs) -> KktSystem:
    """Instantiate the KKT system for a formulation tag ('k2', 'k2r', 'k1s')"""
    if not isinstance(formulation, KktFormulation):
        try:
            formulation = KktFormulation(str(formulation).lower())
        except ValueError:
            choices = ", ".join(f.value for f in KktFormulation)
            raise ValueError(f"Unknown KKT formulation '{formulation}' (choose from {choices})") from None
    return KKT_REGISTRY[formulation](view, **kwargs)


__all__ = [
    "BoundInfo",
    "KktContext",
    "KktFormulation",
    "DELTA_MAX",
    "AssemblyPattern",
    "KktSystem",
    "LinearSolverStats",
    "NewtonStep",
    "k3_residual",
    "recover_bound_steps",
    "recover_dr",
    "K2System",
    "K2rSystem",
    "K1sSystem",
    "KKT_REGISTRY",
    "get_kkt_system",
]
