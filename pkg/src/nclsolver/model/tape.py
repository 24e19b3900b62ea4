"""
Compiled derivative tapes

Every function (objective, constraint rows) is split into its top-level terms ("elements").
Elements with identical structure are stacked into an ElementGroup and evaluated with numpy
across the whole group: forward values, reverse-mode gradients and forward-over-reverse
Hessians. Sparsity of the Jacobian and of the Lagrangian Hessian is fixed at compile time.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

import numpy as np

from ..core.exceptions import DimensionError
from .expr import Expr, NodeKind

logger = logging.getLogger(__name__)

Slot = Tuple[NodeKind, Tuple[int, ...], int]
Pair = Tuple[int, int]

OBJECTIVE = -1


def split_terms(root: Expr) -> List[Expr]:
    """Top-level additive terms of an expression (negations are pushed into sums)"""
    terms: List[Expr] = []
    stack = [(root, False)]
    while stack:
        node, negate = stack.pop()
        if node.kind is NodeKind.SUM:
            stack.extend((child, negate) for child in reversed(node.children))
        elif node.kind is NodeKind.NEG and node.children[0].kind is NodeKind.SUM:
            stack.append((node.children[0], not negate))
        else:
            terms.append(-node if negate else node)
    return terms


def linearize(root: Expr, n_vars: int) -> Tuple[Tuple[Slot, ...], List[int], List[float], List[float]]:
    """
    Postorder slots of a DAG, the sorted global variables it reads, and its constant and
    exponent payloads (in slot order). Variable slots carry their local position.
    """
    order: List[Expr] = []
    seen: Dict[int, int] = {}
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in seen:
            continue
        if expanded or not node.children:
            seen[id(node)] = len(order)
            order.append(node)
            continue
        stack.append((node, True))
        for child in reversed(node.children):
            if id(child) not in seen:
                stack.append((child, False))

    variables = sorted({int(node.value) for node in order if node.kind is NodeKind.VAR})
    if variables and variables[-1] >= n_vars:
        raise DimensionError(f"Variable index {variables[-1]} out of range for {n_vars} variables")
    local = {v: i for i, v in enumerate(variables)}

    slots: List[Slot] = []
    consts: List[float] = []
    exponents: List[float] = []
    for node in order:
        children = tuple(seen[id(c)] for c in node.children)
        pos = -1
        if node.kind is NodeKind.VAR:
            pos = local[int(node.value)]
        elif node.kind is NodeKind.CONST:
            consts.append(float(node.value))
        elif node.kind is NodeKind.POW:
            exponents.append(float(node.value))
        slots.append((node.kind, children, pos))
    return tuple(slots), variables, consts, exponents


def structural_pairs(signature: Sequence[Slot]) -> Tuple[List[FrozenSet[int]], List[Pair]]:
    """Dependency sets per slot and the (p >= q) local pairs with possibly nonzero curvature"""
    deps: List[FrozenSet[int]] = []
    pairs: List[Set[Pair]] = []
    for kind, children, pos in signature:
        if kind is NodeKind.CONST:
            deps.append(frozenset())
            pairs.append(set())
        elif kind is NodeKind.VAR:
            deps.append(frozenset((pos,)))
            pairs.append(set())
        elif kind is NodeKind.SUM:
            deps.append(frozenset().union(*(deps[c] for c in children)))
            pairs.append(set().union(*(pairs[c] for c in children)))
        elif kind is NodeKind.PROD:
            a, b = children
            cross = {(max(p, q), min(p, q)) for p in deps[a] for q in deps[b]}
            deps.append(deps[a] | deps[b])
            pairs.append(pairs[a] | pairs[b] | cross)
        elif kind is NodeKind.NEG:
            deps.append(deps[children[0]])
            pairs.append(set(pairs[children[0]]))
        else:
            d = deps[children[0]]
            deps.append(d)
            pairs.append(pairs[children[0]] | {(max(p, q), min(p, q)) for p in d for q in d})
    return deps, sorted(pairs[-1]) if pairs else []


def _acc(current: Optional[np.ndarray], increment: np.ndarray) -> np.ndarray:
    return increment if current is None else current + increment


@dataclass(eq=False)
class ElementGroup:
    """Structurally identical elements evaluated together"""

    signature: Tuple[Slot, ...]
    var_idx: np.ndarray  # (G, nloc) global variable indices
    consts: np.ndarray  # (G, nconst)
    exponents: np.ndarray  # (G, npow)
    owner: np.ndarray  # (G,) OBJECTIVE or constraint row
    payload: List[int] = field(default_factory=list)
    deps: List[FrozenSet[int]] = field(default_factory=list)
    hess_pairs: List[Pair] = field(default_factory=list)
    jac_pos: Optional[np.ndarray] = None  # (G, nloc) into Jacobian values
    hess_pos: Optional[np.ndarray] = None  # (G, npairs) into Hessian values

    def __post_init__(self) -> None:
        counters = {NodeKind.CONST: 0, NodeKind.POW: 0}
        for kind, _, pos in self.signature:
            if kind in counters:
                self.payload.append(counters[kind])
                counters[kind] += 1
            else:
                self.payload.append(pos)
        self.deps, self.hess_pairs = structural_pairs(self.signature)

    @property
    def size(self) -> int:
        return int(self.owner.size)

    @property
    def nloc(self) -> int:
        return int(self.var_idx.shape[1])

    def forward(self, x: np.ndarray, derivatives: int = 0):
        """Slot values, and first/second derivatives of unary slots when requested"""
        X = x[self.var_idx]
        vals: List[np.ndarray] = []
        d1: List[Optional[np.ndarray]] = []
        d2: List[Optional[np.ndarray]] = []
        with np.errstate(all="ignore"):
            for s, (kind, children, _) in enumerate(self.signature):
                k = self.payload[s]
                first = second = None
                if kind is NodeKind.CONST:
                    v = self.consts[:, k]
                elif kind is NodeKind.VAR:
                    v = X[:, k]
                elif kind is NodeKind.SUM:
                    v = vals[children[0]]
                    for c in children[1:]:
                        v = v + vals[c]
                elif kind is NodeKind.PROD:
                    v = vals[children[0]] * vals[children[1]]
                else:
                    a = vals[children[0]]
                    exponent = self.exponents[:, k] if kind is NodeKind.POW else None
                    v, first, second = _unary(kind, a, exponent, derivatives)
                vals.append(v)
                d1.append(first)
                d2.append(second)
        return vals, d1, d2

    def reverse(self, vals, d1, seed: np.ndarray) -> Tuple[List[Optional[np.ndarray]], np.ndarray]:
        """Adjoints of every slot for the given root seed, and the local gradient (G, nloc)"""
        S = len(self.signature)
        bar: List[Optional[np.ndarray]] = [None] * S
        bar[S - 1] = seed
        grad = np.zeros((self.size, self.nloc))
        for s in range(S - 1, -1, -1):
            b = bar[s]
            if b is None:
                continue
            kind, children, _ = self.signature[s]
            if kind is NodeKind.VAR:
                grad[:, self.payload[s]] += b
            elif kind is NodeKind.SUM:
                for c in children:
                    bar[c] = _acc(bar[c], b)
            elif kind is NodeKind.PROD:
                a, c = children
                bar[a] = _acc(bar[a], b * vals[c])
                bar[c] = _acc(bar[c], b * vals[a])
            elif kind is not NodeKind.CONST:
                bar[children[0]] = _acc(bar[children[0]], b * d1[s])
        return bar, grad

    def hessian_columns(self, vals, d1, d2, bar, directions: Sequence[int]) -> Dict[int, np.ndarray]:
        """Forward-over-reverse: for each local direction j, the column H[:, :, j] as (G, nloc)"""
        S = len(self.signature)
        columns: Dict[int, np.ndarray] = {}
        for j in directions:
            dot: List[Optional[np.ndarray]] = [None] * S
            for s, (kind, children, _) in enumerate(self.signature):
                if j not in self.deps[s]:
                    continue
                if kind is NodeKind.VAR:
                    dot[s] = np.ones(self.size)
                elif kind is NodeKind.SUM:
                    acc = None
                    for c in children:
                        if dot[c] is not None:
                            acc = _acc(acc, dot[c])
                    dot[s] = acc
                elif kind is NodeKind.PROD:
                    a, c = children
                    acc = None
                    if dot[a] is not None:
                        acc = _acc(acc, dot[a] * vals[c])
                    if dot[c] is not None:
                        acc = _acc(acc, vals[a] * dot[c])
                    dot[s] = acc
                elif kind is not NodeKind.CONST:
                    a = children[0]
                    if dot[a] is not None:
                        dot[s] = d1[s] * dot[a]

            bard: List[Optional[np.ndarray]] = [None] * S
            column = np.zeros((self.size, self.nloc))
            for s in range(S - 1, -1, -1):
                kind, children, _ = self.signature[s]
                bd = bard[s]
                b = bar[s]
                if kind is NodeKind.VAR:
                    if bd is not None:
                        column[:, self.payload[s]] += bd
                elif kind is NodeKind.SUM:
                    if bd is not None:
                        for c in children:
                            bard[c] = _acc(bard[c], bd)
                elif kind is NodeKind.PROD:
                    a, c = children
                    for u, w in ((a, c), (c, a)):
                        inc = None
                        if bd is not None:
                            inc = bd * vals[w]
                        if b is not None and dot[w] is not None:
                            inc = _acc(inc, b * dot[w])
                        if inc is not None:
                            bard[u] = _acc(bard[u], inc)
                elif kind is not NodeKind.CONST:
                    a = children[0]
                    inc = None
                    if bd is not None:
                        inc = bd * d1[s]
                    if b is not None and dot[a] is not None and d2[s] is not None:
                        inc = _acc(inc, b * d2[s] * dot[a])
                    if inc is not None:
                        bard[a] = _acc(bard[a], inc)
            columns[j] = column
        return columns


def _unary(kind: NodeKind, a: np.ndarray, p: Optional[np.ndarray], derivatives: int):
    """Value, first and second derivative of a unary node"""
    first = second = None
    if kind is NodeKind.NEG:
        v = -a
        if derivatives:
            first, second = np.full_like(a, -1.0), np.zeros_like(a)
    elif kind is NodeKind.INV:
        v = 1.0 / a
        if derivatives:
            first, second = -v * v, 2.0 * v * v * v
    elif kind is NodeKind.SIN:
        v = np.sin(a)
        if derivatives:
            first, second = np.cos(a), -v
    elif kind is NodeKind.COS:
        v = np.cos(a)
        if derivatives:
            first, second = -np.sin(a), -v
    elif kind is NodeKind.EXP:
        v = np.exp(a)
        if derivatives:
            first, second = v, v
    elif kind is NodeKind.LOG:
        v = np.log(a)
        if derivatives:
            first, second = 1.0 / a, -1.0 / (a * a)
    elif kind is NodeKind.SQRT:
        v = np.sqrt(a)
        if derivatives:
            first, second = 0.5 / v, -0.25 / (v * v * v)
    elif kind is NodeKind.POW:
        v = np.power(a, p)
        if derivatives:
            first = np.where(p == 0.0, 0.0, p * np.power(a, p - 1.0))
            c2 = p * (p - 1.0)
            second = np.where(c2 == 0.0, 0.0, c2 * np.power(a, p - 2.0))
    else:
        raise ValueError(f"Not a unary node kind: {kind}")
    return v, first, second


class CompiledFunctions:
    """Objective and constraint rows compiled into element groups with fixed sparsity"""

    def __init__(self, objective: Expr, constraints: Sequence[Expr], n_vars: int):
        self.n = n_vars
        self.m = len(constraints)
        buckets: Dict[Tuple[bool, Tuple[Slot, ...]], Dict[str, list]] = {}

        functions = [(OBJECTIVE, objective)] + list(enumerate(constraints))
        for owner, root in functions:
            for term in split_terms(root):
                signature, variables, consts, exponents = linearize(term, n_vars)
                key = (owner == OBJECTIVE, signature)
                bucket = buckets.setdefault(key, {"vars": [], "consts": [], "exps": [], "owner": []})
                bucket["vars"].append(variables)
                bucket["consts"].append(consts)
                bucket["exps"].append(exponents)
                bucket["owner"].append(owner)

        self.groups: List[ElementGroup] = []
        for (_, signature), bucket in buckets.items():
            count = len(bucket["owner"])
            nloc = len(bucket["vars"][0])
            nconst = len(bucket["consts"][0])
            npow = len(bucket["exps"][0])
            self.groups.append(
                ElementGroup(
                    signature=signature,
                    var_idx=np.asarray(bucket["vars"], dtype=np.int64).reshape(count, nloc),
                    consts=np.asarray(bucket["consts"], dtype=float).reshape(count, nconst),
                    exponents=np.asarray(bucket["exps"], dtype=float).reshape(count, npow),
                    owner=np.asarray(bucket["owner"], dtype=np.int64),
                )
            )
        self._build_patterns()
        logger.debug(
            f"Compiled {len(self.groups)} element groups: nnz(J)={self.jac_indices.size}, "
            f"nnz(W)={self.hess_rowind.size}"
        )

    @property
    def objective_groups(self) -> List[ElementGroup]:
        return [g for g in self.groups if g.owner.size and g.owner[0] == OBJECTIVE]

    @property
    def constraint_groups(self) -> List[ElementGroup]:
        return [g for g in self.groups if g.owner.size and g.owner[0] != OBJECTIVE]

    def _build_patterns(self) -> None:
        n, m = self.n, self.m
        jac_keys = [
            (g.owner[:, None] * n + g.var_idx).ravel() for g in self.constraint_groups
        ]
        all_jac = np.concatenate(jac_keys) if jac_keys else np.zeros(0, dtype=np.int64)
        jac_unique = np.unique(all_jac)
        rows = jac_unique // n if n else jac_unique
        self.jac_indices = (jac_unique % n).astype(np.int64) if n else jac_unique
        indptr = np.zeros(m + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        self.jac_indptr = np.cumsum(indptr)
        for g in self.constraint_groups:
            keys = g.owner[:, None] * n + g.var_idx
            g.jac_pos = np.searchsorted(jac_unique, keys)

        hess_keys = []
        for g in self.groups:
            for p, q in g.hess_pairs:
                hess_keys.append(g.var_idx[:, q] * n + g.var_idx[:, p])
        all_hess = np.concatenate(hess_keys) if hess_keys else np.zeros(0, dtype=np.int64)
        hess_unique = np.unique(all_hess)
        cols = hess_unique // n if n else hess_unique
        self.hess_rowind = (hess_unique % n).astype(np.int64) if n else hess_unique
        colptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(colptr, cols + 1, 1)
        self.hess_colptr = np.cumsum(colptr)
        for g in self.groups:
            if g.hess_pairs:
                keys = np.stack(
                    [g.var_idx[:, q] * n + g.var_idx[:, p] for p, q in g.hess_pairs], axis=1
                )
                g.hess_pos = np.searchsorted(hess_unique, keys)

    # Evaluation

    def objective(self, x: np.ndarray) -> float:
        total = 0.0
        for g in self.objective_groups:
            vals, _, _ = g.forward(x)
            total += float(np.sum(vals[-1]))
        return total

    def constraints(self, x: np.ndarray) -> np.ndarray:
        c = np.zeros(self.m)
        for g in self.constraint_groups:
            vals, _, _ = g.forward(x)
            np.add.at(c, g.owner, vals[-1])
        return c

    def gradient(self, x: np.ndarray) -> np.ndarray:
        grad = np.zeros(self.n)
        for g in self.objective_groups:
            vals, d1, _ = g.forward(x, derivatives=1)
            _, local = g.reverse(vals, d1, np.ones(g.size))
            np.add.at(grad, g.var_idx, local)
        return grad

    def jacobian_values(self, x: np.ndarray) -> np.ndarray:
        positions, values = [], []
        for g in self.constraint_groups:
            vals, d1, _ = g.forward(x, derivatives=1)
            _, local = g.reverse(vals, d1, np.ones(g.size))
            positions.append(g.jac_pos.ravel())
            values.append(local.ravel())
        return _scatter(positions, values, self.jac_indices.size)

    def hessian_values(self, x: np.ndarray, y: np.ndarray, obj_scale: float) -> np.ndarray:
        """Values of obj_scale * Hess f - sum_i y_i Hess c_i on the lower-triangle pattern"""
        positions, values = [], []
        for g in self.groups:
            if not g.hess_pairs:
                continue
            if g.owner[0] == OBJECTIVE:
                seed = np.full(g.size, float(obj_scale))
            else:
                seed = -y[g.owner]
            vals, d1, d2 = g.forward(x, derivatives=2)
            bar, _ = g.reverse(vals, d1, seed)
            directions = sorted({q for _, q in g.hess_pairs})
            columns = g.hessian_columns(vals, d1, d2, bar, directions)
            for k, (p, q) in enumerate(g.hess_pairs):
                positions.append(g.hess_pos[:, k])
                values.append(columns[q][:, p])
        return _scatter(positions, values, self.hess_rowind.size)


def _scatter(positions: List[np.ndarray], values: List[np.ndarray], size: int) -> np.ndarray:
    if not positions:
        return np.zeros(size)
    return np.bincount(np.concatenate(positions), weights=np.concatenate(values), minlength=size)
