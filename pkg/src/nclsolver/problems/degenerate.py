"""
Degenerate instances: constraint Jacobians that are rank deficient at every point (LICQ fails)
"""

from ..model import ModelBuilder, NcoProblem
from .registry import Family, constant_optimum, register


@register(
    "dup-rows",
    Family.DEGENERATE_LICQ,
    "min t1^2 + t2^2 s.t. t1 + t2 = 1 stated three times, the last copy tilted by eps (t1 - t2)",
    optimum=constant_optimum(0.5, 1e-6, "analytic (symmetry)", (0.5, 0.5)),
)
def dup_rows(eps: float = 0.0) -> NcoProblem:
    mb = ModelBuilder(f"dup-rows(eps={eps:g})")
    t1 = mb.add_variable("t1", start=0.0)
    t2 = mb.add_variable("t2", start=1.0)
    mb.minimize(t1**2 + t2**2)
    mb.add_equality(t1 + t2, rhs=1.0)
    mb.add_equality(t1 + t2, rhs=1.0)
    mb.add_equality(t1 + t2 + float(eps) * (t1 - t2), rhs=1.0)
    return mb.build()


@register(
    "dup-ineq",
    Family.DEGENERATE_LICQ,
    "min t1^2 + t2^2 s.t. t1 + t2 >= 2 written three ways, all active at the solution",
    optimum=constant_optimum(2.0, 1e-6, "analytic", (1.0, 1.0)),
)
def dup_ineq() -> NcoProblem:
    mb = ModelBuilder("dup-ineq")
    t1 = mb.add_variable("t1", start=3.0)
    t2 = mb.add_variable("t2", start=0.5)
    mb.minimize(t1**2 + t2**2)
    mb.add_inequality(t1 + t2, lower=2.0)
    mb.add_inequality(t1 + t2, lower=2.0)
    mb.add_inequality(2 * t1 + 2 * t2, lower=4.0, upper=40.0)
    return mb.build()


@register(
    "lin-dependent",
    Family.DEGENERATE_LICQ,
    "min |t|^2 on the plane sum t = 3, with a scaled copy of the plane and an active inequality copy",
    optimum=constant_optimum(3.0, 1e-6, "analytic", (1.0, 1.0, 1.0)),
)
def lin_dependent() -> NcoProblem:
    mb = ModelBuilder("lin-dependent")
    t1, t2, t3 = mb.add_variables(3, start=[2.0, 0.0, 0.5])
    mb.minimize(t1**2 + t2**2 + t3**2)
    mb.add_equality(t1 + t2 + t3, rhs=3.0)
    mb.add_equality(2 * t1 + 2 * t2 + 2 * t3, rhs=6.0)
    mb.add_equality(t1 - t2)
    mb.add_inequality(t1 + t2 + t3, lower=3.0)
    return mb.build()
