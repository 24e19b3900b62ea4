"""
Simple Example: solving small models with the NCL solver
"""
import os
import sys

# Add the src directory to the Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from nclsolver.model import ModelBuilder  # noqa: E402
from nclsolver.ncl import SolverOptions, solve  # noqa: E402
from nclsolver.problems import build  # noqa: E402


def modeling_example():
    """Build a small degenerate model by hand and solve it"""
    print("NCL Solver - Modeling Example")
    print("=" * 40)

    mb = ModelBuilder("complementarity-demo")
    a = mb.add_variable("a", lower=0.0, start=1.0)
    b = mb.add_variable("b", lower=0.0, start=0.3)
    mb.minimize((a - 1) ** 2 + (b - 1) ** 2)
    mb.add_inequality(a * b, upper=0.0)
    problem = mb.build()

    report = solve(problem, SolverOptions(kkt="k2r", tol=1e-6))
    print(f"\n1. Status: {report.status.value}")
    print(f"   Objective: {report.objective:.8f}")
    print(f"   Solution: a={report.t[0]:.6f}, b={report.t[1]:.6f}")
    print(f"   Iterations: {report.outer_iterations} outer / {report.inner_iterations} inner")


def formulation_example():
    """Solve one registry instance with all three KKT formulations"""
    print("\n2. Comparing KKT formulations on ncvxqp(n=20)")
    for kkt in ("k2", "k2r", "k1s"):
        report = solve(build("ncvxqp(n=20)"), SolverOptions(kkt=kkt, tol=1e-6))
        print(
            f"   {kkt:>4}: {report.status.value:<10} objective={report.objective:.6f} "
            f"inner={report.inner_iterations} linear={report.stats.total_time:.3f}s"
        )


if __name__ == "__main__":
    modeling_example()
    formulation_example()
