"""
Model Module - Expression Graphs and NCO Problems

Build models with operator overloading, compile them into vectorized derivative tapes and
view them as NLPs with slack variables.
"""

from .expr import Expr, NodeKind, add, quicksum, mul, power, inv, sin, cos, exp, log, sqrt
from .nco import (
    INF,
    DerivativeWorkspace,
    ModelBuilder,
    NcoProblem,
    eval_constraints,
    eval_gradient,
    eval_jacobian,
    eval_lag_hessian,
    eval_objective,
)
from .nlp import NlpView, PointEvaluation, to_nlp_form

__all__ = [
    "Expr",
    "NodeKind",
    "add",
    "quicksum",
    "mul",
    "power",
    "inv",
    "sin",
    "cos",
    "exp",
    "log",
    "sqrt",
    "INF",
    "DerivativeWorkspace",
    "ModelBuilder",
    "NcoProblem",
    "eval_objective",
    "eval_constraints",
    "eval_gradient",
    "eval_jacobian",
    "eval_lag_hessian",
    "NlpView",
    "PointEvaluation",
    "to_nlp_form",
]
