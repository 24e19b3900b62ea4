"""
Toy AC optimal power flow on a ring network with a few seeded chords

Per bus: voltage angle va, magnitude vm, generation pg and qg. Power balance is written in
polar form with the bus admittance matrix; line limits bound |V_i - V_k|^2. The reference
angle is fixed by equal bounds.
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ..model import Expr, ModelBuilder, NcoProblem, cos, quicksum, sin
from .registry import Family, check_positive, register

VM_MIN, VM_MAX = 0.94, 1.06
PG_MAX, QG_MAX = 1.0, 0.8
DV_MAX = 0.1


@dataclass(frozen=True)
class Network:
    branches: List[Tuple[int, int]]
    g: np.ndarray  # series conductance per branch
    b: np.ndarray  # series susceptance per branch
    pd: np.ndarray
    qd: np.ndarray
    c2: np.ndarray
    c1: np.ndarray

    @property
    def nbus(self) -> int:
        return self.pd.size


def ring_network(buses: int, seed: int) -> Network:
    rng = np.random.default_rng(seed)
    branches = [(i, (i + 1) % buses) for i in range(buses)] if buses > 2 else [(0, 1)]
    for i in range(0, buses - 3, 5):
        k = i + 2 + int(rng.integers(0, 2))
        branches.append((i, k))
    r = rng.uniform(0.005, 0.02, len(branches))
    x = rng.uniform(0.05, 0.15, len(branches))
    z2 = r**2 + x**2
    pd = rng.uniform(0.1, 0.4, buses)
    return Network(
        branches=branches,
        g=r / z2,
        b=-x / z2,
        pd=pd,
        qd=0.3 * pd,
        c2=rng.uniform(0.5, 2.0, buses),
        c1=rng.uniform(1.0, 3.0, buses),
    )


def _injections(net: Network, va: List[Expr], vm: List[Expr]) -> Tuple[List[Expr], List[Expr]]:
    """Active and reactive injections P_i(V, theta), Q_i(V, theta) from the bus admittance matrix"""
    n = net.nbus
    Gii = np.zeros(n)
    Bii = np.zeros(n)
    p_terms: List[List[Expr]] = [[] for _ in range(n)]
    q_terms: List[List[Expr]] = [[] for _ in range(n)]
    for (i, k), g, b in zip(net.branches, net.g, net.b):
        Gii[i] += g
        Gii[k] += g
        Bii[i] += b
        Bii[k] += b
        for a, c in ((i, k), (k, i)):
            angle = va[a] - va[c]
            vv = vm[a] * vm[c]
            # off-diagonal admittance entries are -g and -b
            p_terms[a].append(vv * (-g * cos(angle) - b * sin(angle)))
            q_terms[a].append(vv * (-g * sin(angle) + b * cos(angle)))
    P = [quicksum(p_terms[i]) + float(Gii[i]) * vm[i] ** 2 for i in range(n)]
    Q = [quicksum(q_terms[i]) - float(Bii[i]) * vm[i] ** 2 for i in range(n)]
    return P, Q


@register("opf-ring", Family.OPF_TOY, "toy AC-OPF on a ring with chords; power balance and line limits")
def opf_ring(buses: int = 10, seed: int = 0) -> NcoProblem:
    check_positive("opf-ring", buses=buses)
    net = ring_network(max(buses, 2), seed)
    n = net.nbus
    mb = ModelBuilder(f"opf-ring(buses={buses}, seed={seed})")
    # reference bus angle fixed at 0
    angle_bound = np.full(n, np.inf)
    angle_bound[0] = 0.0
    va = mb.add_variables(n, lower=-angle_bound, upper=angle_bound, start=0.0, prefix="va")
    vm = mb.add_variables(n, lower=VM_MIN, upper=VM_MAX, start=1.0, prefix="vm")
    pg = mb.add_variables(n, lower=0.0, upper=PG_MAX, start=net.pd, prefix="pg")
    qg = mb.add_variables(n, lower=-QG_MAX, upper=QG_MAX, start=net.qd, prefix="qg")

    mb.minimize(quicksum(float(net.c2[i]) * pg[i] ** 2 + float(net.c1[i]) * pg[i] for i in range(n)))
    P, Q = _injections(net, va, vm)
    for i in range(n):
        mb.add_equality(pg[i] - P[i], rhs=float(net.pd[i]))
        mb.add_equality(qg[i] - Q[i], rhs=float(net.qd[i]))
    for i, k in net.branches:
        drop = vm[i] ** 2 + vm[k] ** 2 - 2 * vm[i] * vm[k] * cos(va[i] - va[k])
        mb.add_inequality(drop, upper=DV_MAX**2)
    return mb.build()
