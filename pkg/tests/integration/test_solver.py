"""
End-to-end NCL solves on the built-in instance library
"""

import numpy as np
import pandas as pd
import pytest

from nclsolver.ipm import IterationRecord
from nclsolver.model import ModelBuilder
from nclsolver.ncl import OuterRecord, SolverOptions, SolveStatus, solve
from nclsolver.ncl.state import RHO_MAX
from nclsolver.problems import build, get_instance, list_instances, load_instance

pytestmark = pytest.mark.integration


def assert_known_optimum(report, ref, tol_factor=1.0):
    name, _, _ = ref.partition("(")
    opt = get_instance(name).known_optimum()
    if opt is None:
        # no reference value; first-order conditions only
        assert max(report.primal_residual, report.dual_residual) <= 1e-8
        return
    assert report.objective == pytest.approx(opt.value, abs=tol_factor * opt.tolerance)
    if opt.point is not None:
        np.testing.assert_allclose(report.t, opt.point, atol=1e-3 * tol_factor)


class TestRegularInstances:
    @pytest.mark.parametrize(
        "name",
        [
            "hs6",
            "hs7",
            "hs35",
            "hs71",
            "simplex-proj",
            "eq-qp",
            pytest.param("ncvxqp", marks=pytest.mark.slow),
            pytest.param("opf-ring", marks=pytest.mark.slow),
        ],
    )
    @pytest.mark.parametrize("kkt", ["k2r", "k1s"])
    def test_reaches_known_optimum(self, name, kkt):
        report = solve(build(name), SolverOptions(kkt=kkt))
        assert report.status is SolveStatus.OPTIMAL
        assert report.constraint_violation <= 1e-7
        assert_known_optimum(report, name)

    @pytest.mark.parametrize("kkt", ["k2", "k2r", "k1s"])
    def test_formulations_agree(self, kkt):
        reference = solve(build("hs71"), SolverOptions(kkt="k2r"))
        report = solve(build("hs71"), SolverOptions(kkt=kkt))
        assert report.status is SolveStatus.OPTIMAL
        assert report.objective == pytest.approx(reference.objective, abs=1e-6)
        np.testing.assert_allclose(report.t, reference.t, atol=1e-5)

    def test_unconstrained_instance_file(self, instance_dir):
        report = solve(load_instance(f"{instance_dir}/rosenbrock.json"), SolverOptions())
        assert report.status is SolveStatus.OPTIMAL
        assert report.objective <= 1e-8
        np.testing.assert_allclose(report.t, [1.0, 1.0], atol=1e-4)

    def test_instance_file_matches_registry(self, instance_dir):
        from_file = solve(load_instance(f"{instance_dir}/hs71.json"), SolverOptions())
        assert from_file.status is SolveStatus.OPTIMAL
        assert_known_optimum(from_file, "hs71")

    def test_multipliers_are_unscaled(self):
        report = solve(build("hs71"), SolverOptions(scaling=True))
        unscaled = solve(build("hs71"), SolverOptions(scaling=False))
        assert report.scaling.obj < 1.0
        np.testing.assert_allclose(report.y, unscaled.y, rtol=1e-4, atol=1e-6)


class TestExtrapolation:
    def test_affine_problem_is_solved_by_extrapolation(self):
        report = solve(build("eq-qp"), SolverOptions(kkt="k2r"))
        frame = report.outer_frame()
        assert report.status is SolveStatus.OPTIMAL
        assert frame["extrapolated"].all()
        np.testing.assert_allclose(frame["alpha"], 1.0)
        assert report.inner_iterations == report.outer_iterations
        assert (frame["residual_after"] <= 0.5 * frame["residual_before"]).all()

    def test_final_iterations_are_extrapolated(self):
        report = solve(build("hs35"), SolverOptions(kkt="k2r"))
        tail = report.outer_frame().tail(2)
        assert report.status is SolveStatus.OPTIMAL
        assert tail["extrapolated"].all()
        np.testing.assert_allclose(tail["alpha"], 1.0)
        assert (tail["residual_after"] < 0.5 * tail["residual_before"]).all()

    def test_branch_uses_unscaled_violation(self):
        mb = ModelBuilder("steep-row")
        t1, t2 = mb.add_variables(2, start=[3.0, 0.0])
        mb.minimize(t1**2 + t2**2)
        mb.add_equality(1e4 * (t1 + t2), rhs=2e4)
        report = solve(mb.build(), SolverOptions())
        assert report.scaling.con[0] < 1.0
        assert report.status is SolveStatus.OPTIMAL
        np.testing.assert_allclose(report.t, [1.0, 1.0], atol=1e-6)
        for record in report.outer_records:
            if record.subproblem in ("extrapolated", "success"):
                assert (record.branch == "success") == (record.primal_residual <= record.eta)

    def test_outer_records_follow_the_schedule(self):
        report = solve(build("hs71"), SolverOptions())
        frame = report.outer_frame()
        assert list(frame.columns) == list(OuterRecord.COLUMNS)
        assert list(frame["k"]) == list(range(len(frame)))
        for prev, cur in zip(report.outer_records, report.outer_records[1:]):
            if prev.branch == "success":
                assert cur.mu < prev.mu and cur.rho == prev.rho
            else:
                assert cur.mu == prev.mu and cur.rho == min(RHO_MAX, 10 * prev.rho)


class TestDegenerateAndMpcc:
    @pytest.mark.parametrize("ref", ["dup-rows", "dup-rows(eps=1e-6)", "dup-ineq", "lin-dependent"])
    def test_degenerate_constraints(self, ref):
        report = solve(build(ref), SolverOptions(kkt="k2r", tol=1e-5))
        assert report.status is SolveStatus.OPTIMAL
        assert_known_optimum(report, ref, tol_factor=100.0)

    def test_optimality_is_judged_at_the_solved_barrier_parameter(self):
        report = solve(build("dup-ineq"), SolverOptions(kkt="k2r", tol=1e-5))
        last = report.outer_records[-1]
        assert report.status is SolveStatus.OPTIMAL
        assert last.mu <= 1e-5 and report.mu == last.mu
        assert report.objective == pytest.approx(2.0, abs=1e-4)
        np.testing.assert_allclose(report.t, [1.0, 1.0], atol=1e-4)

    def test_mpcc_family(self):
        solved = []
        for spec in list_instances("mpcc"):
            report = solve(spec.build(), SolverOptions(kkt="k2r", tol=1e-5))
            opt = spec.known_optimum()
            if report.status is SolveStatus.OPTIMAL and abs(report.objective - opt.value) <= 1e-4 * max(1, opt.value):
                solved.append(spec.name)
        assert len(solved) >= 3, solved

    @pytest.mark.parametrize("kkt", ["k2r", "k1s"])
    def test_mpcc_basic_complementarity(self, mpcc_basic, kkt):
        report = solve(mpcc_basic, SolverOptions(kkt=kkt, tol=1e-6))
        assert report.converged
        assert min(report.t) <= 1e-4
        assert report.objective == pytest.approx(1.0, abs=1e-4)


class TestInfeasible:
    @pytest.mark.parametrize("name", ["infeas-circle", "infeas-qp", "infeas-box"])
    def test_detected(self, name):
        report = solve(build(name), SolverOptions(kkt="k2r"))
        assert report.status is SolveStatus.INFEASIBLE
        assert report.rho == RHO_MAX
        assert report.primal_residual > 1e-8
        assert not report.converged


@pytest.mark.slow
class TestLargerInstances:
    def test_nonconvex_qp(self):
        report = solve(build("ncvxqp"), SolverOptions(kkt="k2r"))
        assert report.status is SolveStatus.OPTIMAL
        assert_known_optimum(report, "ncvxqp")
        assert report.stats.factorizations > report.inner_iterations

    def test_opf_formulations_agree(self):
        k2r = solve(build("opf-ring"), SolverOptions(kkt="k2r", tol=1e-6))
        k1s = solve(build("opf-ring"), SolverOptions(kkt="k1s", tol=1e-6))
        assert k2r.status is SolveStatus.OPTIMAL and k1s.status is SolveStatus.OPTIMAL
        assert k1s.objective == pytest.approx(k2r.objective, rel=1e-5)
        # the reference bus angle is fixed
        assert k2r.t[0] == 0.0 and k1s.t[0] == 0.0

    def test_objective_scaling_invariance(self, hs71):
        mb = ModelBuilder("hs71-scaled")
        t1, t2, t3, t4 = mb.add_variables(4, lower=1.0, upper=5.0, start=[1.0, 5.0, 5.0, 1.0])
        mb.minimize(1e3 * (t1 * t4 * (t1 + t2 + t3) + t3))
        mb.add_inequality(t1 * t2 * t3 * t4, lower=25.0)
        mb.add_equality(t1**2 + t2**2 + t3**2 + t4**2, rhs=40.0)
        scaled = solve(mb.build(), SolverOptions())
        plain = solve(hs71, SolverOptions())
        assert scaled.status is SolveStatus.OPTIMAL
        assert scaled.scaling.obj < plain.scaling.obj
        np.testing.assert_allclose(scaled.t, plain.t, atol=1e-5)
        assert scaled.objective == pytest.approx(1e3 * plain.objective, rel=1e-7)


class TestReport:
    def test_iteration_log(self, tmp_path):
        seen = []
        report = solve(build("hs35"), SolverOptions(callback=seen.append))
        assert len(seen) == report.inner_iterations == len(report.records)
        path = report.write_iterations(tmp_path / "logs" / "hs35.csv")
        frame = pd.read_csv(path)
        assert list(frame.columns) == list(IterationRecord.COLUMNS)
        assert len(frame) == report.inner_iterations
        assert frame["k_inner"].is_monotonic_increasing
        assert (frame["alpha"] > 0).all() and (frame["alpha"] <= 1).all()

    def test_summary(self):
        summary = solve(build("hs6"), SolverOptions(kkt="k1s")).summary()
        assert summary["status"] == "optimal" and summary["kkt"] == "k1s"
        assert summary["factorizations"] >= summary["inner_iterations"]
        assert summary["time_linear"] <= summary["solve_time"]

    def test_iteration_limits(self):
        report = solve(build("hs71"), SolverOptions(max_outer=1))
        assert report.outer_iterations == 1
        assert report.status in (SolveStatus.ACCEPTABLE, SolveStatus.ITERATION_LIMIT)
