"""
Infeasible instances: the solver must stop with rho at its cap and a nonzero constraint residual
"""

from ..model import ModelBuilder, NcoProblem
from .registry import Family, register


@register("infeas-circle", Family.INFEASIBLE, "min t1 s.t. t1^2 + 1 = 0", expected_status="locally-infeasible")
def infeas_circle() -> NcoProblem:
    mb = ModelBuilder("infeas-circle")
    t1 = mb.add_variable("t1", start=1.0)
    mb.minimize(t1)
    mb.add_equality(t1**2 + 1)
    return mb.build()


@register(
    "infeas-qp",
    Family.INFEASIBLE,
    "min t1^2 + t2^2 s.t. t1 + t2 >= 2 and t1 + t2 <= 1",
    expected_status="locally-infeasible",
)
def infeas_qp() -> NcoProblem:
    mb = ModelBuilder("infeas-qp")
    t1 = mb.add_variable("t1", start=0.0)
    t2 = mb.add_variable("t2", start=0.0)
    mb.minimize(t1**2 + t2**2)
    mb.add_inequality(t1 + t2, lower=2.0)
    mb.add_inequality(t1 + t2, upper=1.0)
    return mb.build()


@register(
    "infeas-box",
    Family.INFEASIBLE,
    "min t1^2 + t2^2 s.t. t1 + t2 = 3 with 0 <= t <= 1",
    expected_status="locally-infeasible",
)
def infeas_box() -> NcoProblem:
    mb = ModelBuilder("infeas-box")
    t1, t2 = mb.add_variables(2, lower=0.0, upper=1.0)
    mb.minimize(t1**2 + t2**2)
    mb.add_equality(t1 + t2, rhs=3.0)
    return mb.build()
