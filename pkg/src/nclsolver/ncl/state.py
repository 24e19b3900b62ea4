"""
Outer-loop state and the multiplier / penalty / barrier / tolerance schedule
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

GAMMA = 0.05
TAU = 1.99
MU_FACTOR = 0.2
RHO_MAX = 1e14
RHO_INCREASE = 10.0
THETA_ACCEPT = 0.5
RHO0 = 100.0
MU0 = 0.1
MU_MIN = 1e-20


def eta_for(mu_new: float, mu_old: float) -> float:
    return min(mu_new**1.1, 0.1 * mu_old)


def omega_for(mu: float) -> float:
    return 100.0 * mu ** (1.0 + GAMMA)


@dataclass(frozen=True, eq=False)
class OuterState:
    """Parameters threaded between outer iterations; `branch` names the update that produced them"""

    k: int
    rho: float
    mu: float
    eta: float
    omega: float
    y_k: np.ndarray
    eta_target: float = 1e-8
    omega_target: float = 1e-8
    branch: Optional[str] = None

    @classmethod
    def initial(
        cls,
        y0: np.ndarray,
        eta_target: float = 1e-8,
        omega_target: float = 1e-8,
        rho0: float = RHO0,
        mu0: float = MU0,
    ) -> "OuterState":
        """eta_0 = mu_0^1.1 and omega_0 = 100 mu_0^(1+gamma)"""
        return cls(
            k=0,
            rho=rho0,
            mu=mu0,
            eta=mu0**1.1,
            omega=omega_for(mu0),
            y_k=np.asarray(y0, dtype=float).copy(),
            eta_target=eta_target,
            omega_target=omega_target,
        )


def outer_update(
    state: OuterState, r: np.ndarray, violation: Optional[float] = None, stalled: bool = False
) -> OuterState:
    """
    violation <= eta: y <- y + rho r, shrink mu and retighten eta, omega (rho unchanged).
    Otherwise, or when the subproblem stalled without progress: rho <- min(rho_max, 10 rho),
    everything else unchanged.

    `violation` defaults to |r|_inf; the solver passes the unscaled |r / sigma_c|_inf so that the
    branch and the termination test measure r the same way. mu never drops below MU_MIN.
    """
    r = np.asarray(r, dtype=float)
    if violation is None:
        violation = float(np.max(np.abs(r))) if r.size else 0.0
    if violation <= state.eta and not stalled:
        mu_new = max(MU_MIN, min(state.mu**TAU, MU_FACTOR * state.mu))
        return replace(
            state,
            k=state.k + 1,
            y_k=state.y_k + state.rho * r,
            mu=mu_new,
            eta=eta_for(mu_new, state.mu),
            omega=omega_for(mu_new),
            branch="success",
        )
    return replace(
        state,
        k=state.k + 1,
        rho=min(RHO_MAX, RHO_INCREASE * state.rho),
        branch="failure",
    )


def extrapolation_accepted(F_plus: float, F_current: float, alpha: float, mu: float) -> bool:
    """|F(w+)| <= 0.5 |F(w)| + 10 alpha^0.2 mu"""
    if not np.isfinite(F_plus):
        return False
    return F_plus <= THETA_ACCEPT * F_current + 10.0 * alpha**0.2 * mu
