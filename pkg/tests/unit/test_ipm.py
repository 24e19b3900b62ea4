"""
Tests for the interior-point building blocks and the subproblem solver
"""

import numpy as np
import pytest

from nclsolver.core.exceptions import StepFailure
from nclsolver.ipm import (
    BarrierResidual,
    Filter,
    InteriorPointSolver,
    Iterate,
    SubproblemStatus,
    TrialPoint,
    barrier_objective,
    clip_multipliers,
    fraction_to_boundary,
    fraction_to_boundary_tau,
    initial_iterate,
    line_search,
    push_inside,
    residual,
)
from nclsolver.kkt import BoundInfo, NewtonStep, get_kkt_system
from nclsolver.model import eval_constraints, to_nlp_form

pytestmark = pytest.mark.unit


def box(lower, upper, fixed=None):
    lower, upper = np.asarray(lower, dtype=float), np.asarray(upper, dtype=float)
    return BoundInfo(lower, upper, np.zeros(lower.size, dtype=bool) if fixed is None else np.asarray(fixed, dtype=bool))


def bare_iterate(x, z_l, z_u):
    x = np.asarray(x, dtype=float)
    return Iterate(x, np.zeros(0), np.zeros(0), np.asarray(z_l, dtype=float), np.asarray(z_u, dtype=float))


def bare_step(dx, dz_l, dz_u):
    dx = np.asarray(dx, dtype=float)
    return NewtonStep(dx, np.zeros(0), np.zeros(0), np.asarray(dz_l, dtype=float), np.asarray(dz_u, dtype=float))


def make_ipm(problem, formulation="k2r", callback=None):
    view = to_nlp_form(problem)
    bounds = BoundInfo.from_view(view)
    kkt = get_kkt_system(formulation, view)
    ipm = InteriorPointSolver(view, kkt, bounds, callback=callback)
    t0 = push_inside(np.concatenate([problem.default_start(), np.zeros(view.n_s)]), bounds)[: view.n_t]
    _, c_i = eval_constraints(problem, t0)
    x0 = push_inside(np.concatenate([t0, c_i]), bounds)
    return ipm, x0


class TestBoundary:
    @pytest.mark.parametrize("mu, tau", [(0.1, 0.99), (1.0, 0.99), (1e-4, 1 - 1e-4), (0.0, 1.0)])
    def test_tau(self, mu, tau):
        assert fraction_to_boundary_tau(mu) == pytest.approx(tau, abs=1e-15)

    def test_step_sizes(self):
        w = bare_iterate([1.0], [1.0], [1.0])
        step = bare_step([-2.0], [-4.0], [1.0])
        alpha_p, alpha_d = fraction_to_boundary(w, step, 0.99, box([0.0], [2.0]))
        assert alpha_p == pytest.approx(0.495)
        assert alpha_d == pytest.approx(0.2475)

    def test_full_step_when_moving_inward(self):
        w = bare_iterate([1.0, 5.0], [1.0, 0.0], [1.0, 0.0])
        step = bare_step([0.5, -100.0], [3.0, 0.0], [2.0, 0.0])
        bounds = box([0.0, -np.inf], [2.0, np.inf])
        assert fraction_to_boundary(w, step, 0.99, bounds) == (1.0, 1.0)

    def test_random_steps_stay_interior(self, rng):
        bounds = box(np.zeros(20), np.full(20, 4.0))
        tau = 0.995
        for _ in range(50):
            x = rng.uniform(0.01, 3.99, 20)
            w = bare_iterate(x, rng.uniform(0.1, 2.0, 20), rng.uniform(0.1, 2.0, 20))
            step = bare_step(rng.normal(0, 5, 20), rng.normal(0, 5, 20), rng.normal(0, 5, 20))
            alpha_p, alpha_d = fraction_to_boundary(w, step, tau, bounds)
            gap_l, gap_u = bounds.gaps(x + alpha_p * step.dx)
            assert np.all(gap_l >= (1 - tau) * x - 1e-12)
            assert np.all(gap_u >= (1 - tau) * (4.0 - x) - 1e-12)
            assert np.all(w.z_l + alpha_d * step.dz_l >= (1 - tau) * w.z_l - 1e-12)
            assert 0 < alpha_p <= 1 and 0 < alpha_d <= 1

    def test_clip_multipliers(self):
        bounds = box([0.0, 0.0, -np.inf], [np.inf, np.inf, np.inf])
        w = bare_iterate([2.0, 2.0, 0.0], [1e12, 1e-20, 3.0], [5.0, 5.0, 5.0])
        clipped = clip_multipliers(w, 0.1, bounds)
        np.testing.assert_allclose(clipped.z_l, [1e10 * 0.1 / 2.0, 0.1 / (1e10 * 2.0), 0.0])
        np.testing.assert_array_equal(clipped.z_u, 0.0)

    def test_push_inside(self):
        bounds = box(
            [0.0, 0.0, -np.inf, 2.0, 1.0, -np.inf],
            [10.0, 1e-3, 3.0, 2.0, np.inf, np.inf],
            fixed=[0, 0, 0, 1, 0, 0],
        )
        x = push_inside(np.array([-1.0, 0.0, 5.0, 7.0, 50.0, -8.0]), bounds)
        np.testing.assert_allclose(x, [0.01, 1e-5, 2.97, 2.0, 50.0, -8.0])


class TestResidual:
    def test_blocks(self, bounded_qp, rng):
        view = to_nlp_form(bounded_qp)
        bounds = BoundInfo.from_view(view)
        x = push_inside(np.concatenate([bounded_qp.default_start(), [0.0, 1.0]]), bounds)
        w = Iterate(x, rng.standard_normal(view.m), rng.standard_normal(view.m), np.ones(view.n), np.ones(view.n))
        y_k = rng.standard_normal(view.m)
        F = residual(view, w, 3.0, y_k, 0.1, bounds)
        ev = view.evaluate(x)
        np.testing.assert_allclose(F.r_block, y_k + 3.0 * w.r - w.y)
        np.testing.assert_allclose(F.primal, ev.constraints + w.r)
        np.testing.assert_allclose(F.stationarity, ev.gradient - ev.jacobian.T @ w.y - w.z_l + w.z_u)
        gap_l, _ = bounds.gaps(x)
        np.testing.assert_allclose(F.comp_l, np.where(bounds.has_lower, gap_l - 0.1, 0.0))
        assert F.norm == max(F.block_norms().values())

    def test_barrier_objective(self):
        bounds = box([0.0], [np.inf])
        w = Iterate(np.array([np.e]), np.array([2.0]), np.zeros(1), np.ones(1), np.zeros(1))
        value = barrier_objective(None, w, 4.0, np.array([0.5]), 0.1, bounds, objective=1.0)
        assert value == pytest.approx(1.0 + 1.0 + 8.0 - 0.1)

    def test_initial_iterate(self, hs71):
        view = to_nlp_form(hs71)
        bounds = BoundInfo.from_view(view)
        y0 = np.array([0.5, -0.5])
        w = initial_iterate(view, bounds, np.array([1.0, 5.0, 5.0, 1.0, 25.0]), y0, 0.1)
        gap_l, gap_u = bounds.gaps(w.x)
        assert np.all(gap_l[bounds.has_lower] > 0) and np.all(gap_u[bounds.has_upper] > 0)
        np.testing.assert_allclose((w.z_l * gap_l)[bounds.has_lower], 0.1)
        np.testing.assert_allclose((w.z_u * gap_u)[bounds.has_upper], 0.1)
        np.testing.assert_array_equal(w.r, 0.0)
        np.testing.assert_array_equal(w.y, y0)
        assert w.y is not y0


def point(theta, phi, res):
    F = BarrierResidual(np.array([res]), np.zeros(0), np.zeros(0), np.zeros(0), np.zeros(0))
    return TrialPoint(bare_iterate([0.0], [0.0], [0.0]), theta, phi, F)


class TestLineSearch:
    def test_filter(self):
        filt = Filter()
        assert filt.acceptable(1e9, 1e9)
        filt.add(1.0, 1.0)
        assert filt.acceptable(0.5, 2.0)
        assert filt.acceptable(2.0, 0.5)
        assert not filt.acceptable(1.0, 1.0)
        filt.add(0.5, 0.5)
        assert filt.entries == [(0.5, 0.5)]

    def test_full_step_accepted_by_filter(self):
        filt = Filter()
        result = line_search(point(1.0, 1.0, 1.0), 1.0, 0.8, lambda ap, ad: point(1.0 - 0.5 * ap, 1.0, 0.5), filt)
        assert result.accepted and result.by_filter
        assert (result.alpha_p, result.alpha_d, result.backtracks) == (1.0, 0.8, 0)
        assert filt.entries == [(1.0, 1.0)]

    def test_backtracks_past_non_finite_trials(self):
        def trial(ap, ad):
            return point(np.inf if ap > 0.3 else 0.5, 1.0, 0.5)

        result = line_search(point(1.0, 1.0, 1.0), 1.0, 1.0, trial, Filter())
        assert result.accepted and result.backtracks == 2
        assert result.alpha_p == 0.25

    def test_residual_decrease_fallback(self):
        result = line_search(point(1.0, 1.0, 1.0), 1.0, 1.0, lambda ap, ad: point(2.0, 2.0, 0.1), Filter())
        assert result.accepted and not result.by_filter

    def test_failure(self):
        result = line_search(point(1.0, 1.0, 1.0), 1.0, 1.0, lambda ap, ad: point(2.0, 2.0, 2.0), Filter(), 3)
        assert not result.accepted and result.trial is None
        assert result.backtracks == 3


class TestSubproblem:
    @pytest.mark.parametrize("formulation", ["k2", "k2r", "k1s"])
    def test_converges_on_hs71(self, hs71, formulation):
        seen = []
        ipm, x0 = make_ipm(hs71, formulation, callback=seen.append)
        w0 = initial_iterate(ipm.view, ipm.bounds, x0, np.zeros(ipm.view.m), 0.1)
        result = ipm.subproblem_solve(w0, 100.0, np.zeros(ipm.view.m), 0.1, 1e-6, 200)
        assert result.status is SubproblemStatus.SUCCESS and result.success
        assert result.residual.norm <= 1e-6
        assert result.iterations == len(ipm.records) == len(seen) == ipm.total_iterations
        assert [r.k_inner for r in ipm.records] == list(range(1, result.iterations + 1))

    def test_loose_tolerance_returns_immediately(self, bounded_qp):
        ipm, x0 = make_ipm(bounded_qp)
        w0 = initial_iterate(ipm.view, ipm.bounds, x0, np.zeros(ipm.view.m), 0.1)
        result = ipm.subproblem_solve(w0, 10.0, np.zeros(ipm.view.m), 0.1, 1e6, 50)
        assert result.success and result.iterations == 0
        assert ipm.records == []

    def test_zero_budget(self, bounded_qp):
        ipm, x0 = make_ipm(bounded_qp)
        w0 = initial_iterate(ipm.view, ipm.bounds, x0, np.zeros(ipm.view.m), 0.1)
        result = ipm.subproblem_solve(w0, 10.0, np.zeros(ipm.view.m), 0.1, 1e-12, 0)
        assert result.status is SubproblemStatus.BUDGET_EXHAUSTED
        assert result.iterations == 0 and not result.progress

    def test_step_failure_is_reported(self, bounded_qp, monkeypatch):
        ipm, x0 = make_ipm(bounded_qp)

        def fail(ctx):
            raise StepFailure("no step", 1e41, 60)

        monkeypatch.setattr(ipm.kkt, "solve_with_inertia_correction", fail)
        w0 = initial_iterate(ipm.view, ipm.bounds, x0, np.zeros(ipm.view.m), 0.1)
        result = ipm.subproblem_solve(w0, 10.0, np.zeros(ipm.view.m), 0.1, 1e-12, 10)
        assert result.status is SubproblemStatus.STEP_FAILURE
        assert not result.progress
        assert result.w is w0
