"""
Expression graph with operator overloading

Nodes are immutable and may be shared, so a model is a DAG. Sums are kept n-ary and flattened
on construction; products are binary; powers carry a constant exponent.
"""

import math
import numbers
from enum import Enum
from typing import Iterable, Tuple, Union

Number = Union[int, float]


class NodeKind(Enum):
    """Expression node kinds"""

    CONST = "const"
    VAR = "var"
    SUM = "sum"
    PROD = "prod"
    POW = "pow"
    NEG = "neg"
    INV = "inv"
    SIN = "sin"
    COS = "cos"
    EXP = "exp"
    LOG = "log"
    SQRT = "sqrt"


UNARY_KINDS = (
    NodeKind.POW,
    NodeKind.NEG,
    NodeKind.INV,
    NodeKind.SIN,
    NodeKind.COS,
    NodeKind.EXP,
    NodeKind.LOG,
    NodeKind.SQRT,
)

_SCALAR_FUNCS = {
    NodeKind.SIN: math.sin,
    NodeKind.COS: math.cos,
    NodeKind.EXP: math.exp,
    NodeKind.LOG: math.log,
    NodeKind.SQRT: math.sqrt,
}


class Expr:
    """A node of the expression graph; `value` holds the constant, variable index or exponent"""

    __slots__ = ("kind", "children", "value")

    def __init__(self, kind: NodeKind, children: Tuple["Expr", ...] = (), value: float = 0.0):
        self.kind = kind
        self.children = children
        self.value = value

    # Construction helpers

    @staticmethod
    def const(value: Number) -> "Expr":
        return Expr(NodeKind.CONST, (), float(value))

    @staticmethod
    def var(index: int) -> "Expr":
        if index < 0:
            raise ValueError(f"Variable index must be nonnegative, got {index}")
        return Expr(NodeKind.VAR, (), int(index))

    @property
    def is_const(self) -> bool:
        return self.kind is NodeKind.CONST

    def __repr__(self) -> str:
        if self.kind is NodeKind.CONST:
            return f"{self.value:g}"
        if self.kind is NodeKind.VAR:
            return f"t[{int(self.value)}]"
        if self.kind is NodeKind.POW:
            return f"({self.children[0]!r} ** {self.value:g})"
        inner = ", ".join(repr(c) for c in self.children)
        return f"{self.kind.value}({inner})"

    # Arithmetic

    def __add__(self, other: Union["Expr", Number]) -> "Expr":
        return add(self, other)

    def __radd__(self, other: Number) -> "Expr":
        return add(other, self)

    def __sub__(self, other: Union["Expr", Number]) -> "Expr":
        return add(self, -as_expr(other))

    def __rsub__(self, other: Number) -> "Expr":
        return add(other, -self)

    def __mul__(self, other: Union["Expr", Number]) -> "Expr":
        return mul(self, other)

    def __rmul__(self, other: Number) -> "Expr":
        return mul(other, self)

    def __truediv__(self, other: Union["Expr", Number]) -> "Expr":
        other = as_expr(other)
        if other.is_const:
            return mul(self, 1.0 / other.value)
        return mul(self, inv(other))

    def __rtruediv__(self, other: Number) -> "Expr":
        return mul(other, inv(self))

    def __pow__(self, exponent: Union["Expr", Number]) -> "Expr":
        return power(self, exponent)

    def __rpow__(self, base: Number) -> "Expr":
        return exp(mul(self, math.log(float(base))))

    def __neg__(self) -> "Expr":
        if self.is_const:
            return Expr.const(-self.value)
        if self.kind is NodeKind.NEG:
            return self.children[0]
        return Expr(NodeKind.NEG, (self,))

    def __pos__(self) -> "Expr":
        return self


def as_expr(value: Union[Expr, Number]) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, numbers.Real) and not isinstance(value, bool):
        return Expr.const(float(value))
    raise TypeError(f"Cannot use {type(value).__name__} in an expression")


def add(*terms: Union[Expr, Number]) -> Expr:
    """n-ary sum; nested sums are flattened and constants folded"""
    children = []
    constant = 0.0
    for term in terms:
        node = as_expr(term)
        if node.kind is NodeKind.SUM:
            for child in node.children:
                if child.is_const:
                    constant += child.value
                else:
                    children.append(child)
        elif node.is_const:
            constant += node.value
        else:
            children.append(node)
    if constant != 0.0 or not children:
        children.append(Expr.const(constant))
    if len(children) == 1:
        return children[0]
    return Expr(NodeKind.SUM, tuple(children))


def quicksum(terms: Iterable[Union[Expr, Number]]) -> Expr:
    return add(*list(terms))


def mul(a: Union[Expr, Number], b: Union[Expr, Number]) -> Expr:
    a, b = as_expr(a), as_expr(b)
    if a.is_const and b.is_const:
        return Expr.const(a.value * b.value)
    if a.is_const and a.value == 1.0:
        return b
    if b.is_const and b.value == 1.0:
        return a
    return Expr(NodeKind.PROD, (a, b))


def power(base: Union[Expr, Number], exponent: Union[Expr, Number]) -> Expr:
    base, exponent = as_expr(base), as_expr(exponent)
    if not exponent.is_const:
        return exp(mul(exponent, log(base)))
    p = exponent.value
    if base.is_const:
        return Expr.const(base.value**p)
    if p == 0.0:
        return Expr.const(1.0)
    if p == 1.0:
        return base
    return Expr(NodeKind.POW, (base,), p)


def _unary(kind: NodeKind, arg: Union[Expr, Number]) -> Expr:
    node = as_expr(arg)
    if node.is_const:
        return Expr.const(_SCALAR_FUNCS[kind](node.value))
    return Expr(kind, (node,))


def inv(arg: Union[Expr, Number]) -> Expr:
    node = as_expr(arg)
    if node.is_const:
        return Expr.const(1.0 / node.value)
    return Expr(NodeKind.INV, (node,))


def sin(arg: Union[Expr, Number]) -> Expr:
    return _unary(NodeKind.SIN, arg)


def cos(arg: Union[Expr, Number]) -> Expr:
    return _unary(NodeKind.COS, arg)


def exp(arg: Union[Expr, Number]) -> Expr:
    return _unary(NodeKind.EXP, arg)


def log(arg: Union[Expr, Number]) -> Expr:
    return _unary(NodeKind.LOG, arg)


def sqrt(arg: Union[Expr, Number]) -> Expr:
    return _unary(NodeKind.SQRT, arg)
