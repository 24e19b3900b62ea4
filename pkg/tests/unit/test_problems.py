"""
Tests for the instance registry and the built-in families
"""

import math

import numpy as np
import pytest

from nclsolver.core.exceptions import InvalidSizeError, UnknownInstanceError
from nclsolver.model import eval_constraints, eval_objective
from nclsolver.ncl import constraint_violation
from nclsolver.problems import INSTANCE_REGISTRY, Family, build, get_instance, list_instances, parse_instance_ref

pytestmark = pytest.mark.unit


class TestRegistry:
    def test_library_covers_every_family(self):
        assert len(INSTANCE_REGISTRY) >= 12
        families = {spec.family for spec in INSTANCE_REGISTRY.values()}
        assert families == set(Family)

    def test_names_match_keys(self):
        for name, spec in INSTANCE_REGISTRY.items():
            assert spec.name == name

    def test_list_is_sorted_and_filtered(self):
        names = [s.name for s in list_instances()]
        assert names == sorted(names)
        mpcc = list_instances("mpcc")
        assert len(mpcc) == 5
        assert all(s.family is Family.MPCC for s in mpcc)

    def test_unknown_family_tag(self):
        with pytest.raises(ValueError):
            list_instances("convex")

    def test_infeasible_family_expects_infeasibility(self):
        for spec in list_instances("infeasible"):
            assert spec.expected_status == "locally-infeasible"
            assert spec.known_optimum() is None

    @pytest.mark.parametrize(
        "ref, name, params",
        [
            ("hs6", "hs6", {}),
            ("ncvxqp(n=10, m=4)", "ncvxqp", {"n": 10, "m": 4}),
            (" dup-rows(eps=1e-3) ", "dup-rows", {"eps": 1e-3}),
            ("mpcc-chain()", "mpcc-chain", {}),
        ],
    )
    def test_parse_reference(self, ref, name, params):
        assert parse_instance_ref(ref) == (name, params)

    def test_parse_reference_errors(self):
        with pytest.raises(UnknownInstanceError):
            parse_instance_ref("bad name!")
        with pytest.raises(InvalidSizeError):
            parse_instance_ref("ncvxqp(20)")

    def test_canonical_reference(self):
        spec = get_instance("ncvxqp")
        assert spec.reference(n=10) == "ncvxqp(n=10, m=8, seed=0)"
        assert get_instance("hs71").reference() == "hs71"

    def test_unknown_instance(self):
        with pytest.raises(UnknownInstanceError, match="nclsolver list"):
            build("hs999")

    def test_unknown_parameter(self):
        with pytest.raises(InvalidSizeError, match="no parameter"):
            build("hs6(n=3)")

    @pytest.mark.parametrize("ref", ["mpcc-chain(n=0)", "eq-qp(n=5, m=6)", "ncvxqp(n=8, m=8)", "opf-ring(buses=2.5)"])
    def test_invalid_sizes(self, ref):
        with pytest.raises(InvalidSizeError):
            build(ref)

    def test_keyword_parameters_override_reference(self):
        p = build("mpcc-chain(n=2)", n=3)
        assert p.n_t == 6
        assert (p.m_e, p.m_i) == (0, 3)


class TestInstanceShapes:
    def test_opf_sizes(self):
        p = build("opf-ring(buses=6)")
        assert p.n_t == 24
        assert p.m_e == 12
        # six ring branches and one chord
        assert p.m_i == 7
        assert p.lower[0] == p.upper[0] == 0.0

    def test_seeded_instances_are_deterministic(self):
        a = build("ncvxqp(n=12, m=4, seed=3)")
        b = build("ncvxqp(n=12, m=4, seed=3)")
        c = build("ncvxqp(n=12, m=4, seed=4)")
        np.testing.assert_array_equal(a.lower, b.lower)
        assert not np.array_equal(a.lower, c.lower)

    def test_dup_rows_duplicates_a_row(self):
        p = build("dup-rows")
        c_e, _ = eval_constraints(p, np.array([0.3, 0.2]))
        assert p.m_e == 3
        np.testing.assert_allclose(c_e, c_e[0])

    def test_infeasible_instances_are_infeasible(self, rng):
        for spec in list_instances("infeasible"):
            p = spec.build()
            for _ in range(20):
                t = np.clip(rng.uniform(-3.0, 3.0, p.n_t), p.lower, p.upper)
                assert constraint_violation(p, t) > 0.25


def _with_points():
    for spec in list_instances():
        opt = spec.known_optimum()
        if opt is not None and opt.point is not None:
            yield spec.name


class TestKnownOptima:
    @pytest.mark.parametrize("name", list(_with_points()))
    def test_optimum_point_is_feasible_and_attains_value(self, name):
        spec = get_instance(name)
        opt = spec.known_optimum()
        p = spec.build()
        t = np.asarray(opt.point)
        assert constraint_violation(p, t) <= 1e-9
        assert eval_objective(p, t) == pytest.approx(opt.value, rel=1e-9, abs=1e-9)

    def test_hs7_value(self):
        assert get_instance("hs7").known_optimum().value == pytest.approx(-math.sqrt(3.0))

    @pytest.mark.parametrize("n", [1, 3, 7])
    def test_mpcc_optima_scale_with_size(self, n):
        assert get_instance("mpcc-chain").known_optimum(n=n).value == n
        assert get_instance("mpcc-sum").known_optimum(n=n).value == n

    def test_mpcc_minimizers(self):
        for name in ("mpcc-basic", "mpcc-eq"):
            p = build(name)
            for t in ([1.0, 0.0], [0.0, 1.0]):
                assert constraint_violation(p, np.array(t)) == 0.0
                assert eval_objective(p, np.array(t)) == 1.0

    def test_simplex_point_lies_on_simplex(self):
        t = np.asarray(get_instance("simplex-proj").known_optimum(n=9).point)
        assert t.sum() == pytest.approx(1.0)
        assert np.all(t >= 0.0)

    def test_ncvxqp_bounds_are_inactive(self):
        spec = get_instance("ncvxqp")
        p = spec.build()
        t = np.asarray(spec.known_optimum().point)
        assert np.all(t - p.lower >= 1.0 - 1e-12)
        assert np.all(p.upper - t >= 1.0 - 1e-12)

    def test_opf_has_no_reference_value(self):
        assert get_instance("opf-ring").known_optimum() is None
