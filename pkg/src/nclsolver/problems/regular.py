"""
Regular instances: classical small test problems and two scalable convex QPs with closed-form optima
"""

import math

import numpy as np

from ..core.exceptions import InvalidSizeError
from ..model import ModelBuilder, NcoProblem, log, quicksum
from .registry import Family, KnownOptimum, check_positive, constant_optimum, register


@register(
    "hs6",
    Family.REGULAR,
    "min (1-t1)^2 s.t. 10(t2 - t1^2) = 0",
    optimum=constant_optimum(0.0, 1e-6, "analytic", (1.0, 1.0)),
)
def hs6() -> NcoProblem:
    mb = ModelBuilder("hs6")
    t1 = mb.add_variable("t1", start=-1.2)
    t2 = mb.add_variable("t2", start=1.0)
    mb.minimize((1 - t1) ** 2)
    mb.add_equality(10 * (t2 - t1**2))
    return mb.build()


@register(
    "hs7",
    Family.REGULAR,
    "min log(1+t1^2) - t2 s.t. (1+t1^2)^2 + t2^2 = 4",
    optimum=constant_optimum(-math.sqrt(3.0), 1e-6, "analytic", (0.0, math.sqrt(3.0))),
)
def hs7() -> NcoProblem:
    mb = ModelBuilder("hs7")
    t1 = mb.add_variable("t1", start=2.0)
    t2 = mb.add_variable("t2", start=2.0)
    mb.minimize(log(1 + t1**2) - t2)
    mb.add_equality((1 + t1**2) ** 2 + t2**2, rhs=4.0)
    return mb.build()


@register(
    "hs35",
    Family.REGULAR,
    "convex QP with one linear inequality and nonnegative variables",
    optimum=constant_optimum(1.0 / 9.0, 1e-6, "analytic", (4.0 / 3.0, 7.0 / 9.0, 4.0 / 9.0)),
)
def hs35() -> NcoProblem:
    mb = ModelBuilder("hs35")
    t1, t2, t3 = mb.add_variables(3, lower=0.0, start=0.5)
    mb.minimize(
        9 - 8 * t1 - 6 * t2 - 4 * t3 + 2 * t1**2 + 2 * t2**2 + t3**2 + 2 * t1 * t2 + 2 * t1 * t3
    )
    mb.add_inequality(t1 + t2 + 2 * t3, upper=3.0)
    return mb.build()


@register(
    "hs71",
    Family.REGULAR,
    "min t1 t4 (t1+t2+t3) + t3 s.t. t1 t2 t3 t4 >= 25, sum t_i^2 = 40, 1 <= t <= 5",
    optimum=constant_optimum(17.0140173, 1e-6, "published optimum of the test collection"),
)
def hs71() -> NcoProblem:
    mb = ModelBuilder("hs71")
    t1, t2, t3, t4 = mb.add_variables(4, lower=1.0, upper=5.0, start=[1.0, 5.0, 5.0, 1.0])
    mb.minimize(t1 * t4 * (t1 + t2 + t3) + t3)
    mb.add_inequality(t1 * t2 * t3 * t4, lower=25.0)
    mb.add_equality(t1**2 + t2**2 + t3**2 + t4**2, rhs=40.0)
    return mb.build()


def _simplex_target(n: int) -> np.ndarray:
    i = np.arange(1, n + 1, dtype=float)
    return 0.5 * np.sin(i) + 1.0 / n


def project_onto_simplex(a: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {t >= 0, sum t = 1} by sorting"""
    u = np.sort(a)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, a.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.maximum(a - css[rho] / (rho + 1.0), 0.0)


def _simplex_optimum(n: int) -> KnownOptimum:
    a = _simplex_target(n)
    t = project_onto_simplex(a)
    return KnownOptimum(float(0.5 * np.sum((t - a) ** 2)), 1e-6, "sort-based simplex projection", tuple(t))


@register(
    "simplex-proj",
    Family.REGULAR,
    "Euclidean projection of a fixed vector onto the probability simplex",
    optimum=_simplex_optimum,
)
def simplex_proj(n: int = 20) -> NcoProblem:
    check_positive("simplex-proj", n=n)
    a = _simplex_target(n)
    mb = ModelBuilder(f"simplex-proj(n={n})")
    t = mb.add_variables(n, lower=0.0, start=1.0 / n)
    mb.minimize(quicksum(0.5 * (t[i] - float(a[i])) ** 2 for i in range(n)))
    mb.add_equality(quicksum(t), rhs=1.0)
    return mb.build()


def _eq_qp_data(n: int, m: int, seed: int):
    rng = np.random.default_rng(seed)
    A = np.zeros((m, n))
    A[np.arange(m), np.arange(m)] = 1.0
    mask = rng.random((m, n)) < min(1.0, 3.0 / n)
    A += mask * rng.uniform(-1.0, 1.0, (m, n))
    b = rng.uniform(-1.0, 1.0, m)
    return A, b


def _eq_qp_optimum(n: int, m: int, seed: int) -> KnownOptimum:
    A, b = _eq_qp_data(n, m, seed)
    t = np.linalg.lstsq(A, b, rcond=None)[0]
    return KnownOptimum(float(0.5 * t @ t), 1e-6, "minimum-norm solution of A t = b", tuple(t))


@register(
    "eq-qp",
    Family.REGULAR,
    "minimum-norm point of a sparse full-rank linear system",
    optimum=_eq_qp_optimum,
)
def eq_qp(n: int = 30, m: int = 10, seed: int = 0) -> NcoProblem:
    check_positive("eq-qp", n=n, m=m)
    if m > n:
        raise InvalidSizeError(f"eq-qp: m={m} exceeds n={n}")
    A, b = _eq_qp_data(n, m, seed)
    mb = ModelBuilder(f"eq-qp(n={n}, m={m}, seed={seed})")
    t = mb.add_variables(n, start=0.0)
    mb.minimize(quicksum(0.5 * ti**2 for ti in t))
    for i in range(m):
        cols = np.nonzero(A[i])[0]
        mb.add_equality(quicksum(float(A[i, j]) * t[j] for j in cols), rhs=float(b[i]))
    return mb.build()

