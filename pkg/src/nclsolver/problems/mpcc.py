"""
MPCC instances: complementarity a >= 0, b >= 0, a b <= 0, so MFCQ fails at every feasible point
"""

from ..model import ModelBuilder, NcoProblem, quicksum
from .registry import Family, KnownOptimum, check_positive, constant_optimum, register


@register(
    "mpcc-basic",
    Family.MPCC,
    "min (t1-1)^2 + (t2-1)^2 s.t. t >= 0, t1 t2 <= 0",
    optimum=constant_optimum(1.0, 1e-6, "analytic; minimizers (1,0) and (0,1)"),
)
def mpcc_basic() -> NcoProblem:
    mb = ModelBuilder("mpcc-basic")
    t1 = mb.add_variable("t1", lower=0.0, start=1.0)
    t2 = mb.add_variable("t2", lower=0.0, start=0.3)
    mb.minimize((t1 - 1) ** 2 + (t2 - 1) ** 2)
    mb.add_inequality(t1 * t2, upper=0.0)
    return mb.build()


@register(
    "mpcc-eq",
    Family.MPCC,
    "min (t1-1)^2 + (t2-1)^2 s.t. t >= 0, t1 t2 = 0",
    optimum=constant_optimum(1.0, 1e-6, "analytic; minimizers (1,0) and (0,1)"),
)
def mpcc_eq() -> NcoProblem:
    mb = ModelBuilder("mpcc-eq")
    t1 = mb.add_variable("t1", lower=0.0, start=0.3)
    t2 = mb.add_variable("t2", lower=0.0, start=1.0)
    mb.minimize((t1 - 1) ** 2 + (t2 - 1) ** 2)
    mb.add_equality(t1 * t2)
    return mb.build()


@register(
    "mpcc-shift",
    Family.MPCC,
    "min (t1-2)^2 + (t2-1)^2 s.t. t >= 0, t1 t2 <= 0; global minimizer (2,0), local (0,1)",
    optimum=constant_optimum(1.0, 1e-6, "analytic", (2.0, 0.0)),
)
def mpcc_shift() -> NcoProblem:
    mb = ModelBuilder("mpcc-shift")
    t1 = mb.add_variable("t1", lower=0.0, start=1.5)
    t2 = mb.add_variable("t2", lower=0.0, start=0.2)
    mb.minimize((t1 - 2) ** 2 + (t2 - 1) ** 2)
    mb.add_inequality(t1 * t2, upper=0.0)
    return mb.build()


@register(
    "mpcc-chain",
    Family.MPCC,
    "n independent complementarity pairs, each contributing 1 at the optimum",
    optimum=lambda n: KnownOptimum(float(n), 1e-6 * max(1, n), "analytic (separable pairs)"),
)
def mpcc_chain(n: int = 5) -> NcoProblem:
    check_positive("mpcc-chain", n=n)
    mb = ModelBuilder(f"mpcc-chain(n={n})")
    a = mb.add_variables(n, lower=0.0, start=1.0, prefix="a")
    b = mb.add_variables(n, lower=0.0, start=0.3, prefix="b")
    mb.minimize(quicksum((a[i] - 1) ** 2 + (b[i] - 1) ** 2 for i in range(n)))
    for i in range(n):
        mb.add_inequality(a[i] * b[i], upper=0.0)
    return mb.build()


@register(
    "mpcc-sum",
    Family.MPCC,
    "n pairs coupled through one aggregated complementarity row sum a_i b_i <= 0",
    optimum=lambda n: KnownOptimum(float(n), 1e-6 * max(1, n), "analytic (a = 0, b = 2)"),
)
def mpcc_sum(n: int = 4) -> NcoProblem:
    check_positive("mpcc-sum", n=n)
    mb = ModelBuilder(f"mpcc-sum(n={n})")
    a = mb.add_variables(n, lower=0.0, start=0.3, prefix="a")
    b = mb.add_variables(n, lower=0.0, start=1.5, prefix="b")
    mb.minimize(quicksum((a[i] - 1) ** 2 + (b[i] - 2) ** 2 for i in range(n)))
    mb.add_inequality(quicksum(a[i] * b[i] for i in range(n)), upper=0.0)
    return mb.build()
