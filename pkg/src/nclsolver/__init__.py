"""
nclsolver - Augmented Lagrangian NLP Solver with Interior-Point Subproblems

Solves degenerate nonlinear programs with Algorithm NCL: each outer iteration relaxes the
constraints with auxiliary variables r and solves the subproblem with a primal-dual
interior-point method whose Newton systems are assembled in one of three KKT formulations
(K2, K2r, K1s) and factorized by a static-pivoting sparse LDL^T.
"""

__version__ = "1.0.0"
__author__ = "NCL Solver Development Team"
