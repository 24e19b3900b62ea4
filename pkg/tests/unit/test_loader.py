"""
Tests for JSON instance files and prefix expressions
"""

import json
import math
import os

import numpy as np
import pytest

from nclsolver.core.exceptions import InstanceParseError, UnsupportedOperatorError
from nclsolver.model import eval_constraints, eval_objective
from nclsolver.problems import build, load_instance, parse_instance

pytestmark = pytest.mark.unit


def one_variable(objective, **var):
    doc = {"name": "probe", "variables": [{"name": "x", **var}], "objective": objective}
    return parse_instance(json.dumps(doc))


class TestInstanceFiles:
    def test_hs6_file_matches_registry(self, instance_dir, rng):
        from_file = load_instance(os.path.join(instance_dir, "hs6.json"))
        builtin = build("hs6")
        np.testing.assert_array_equal(from_file.default_start(), builtin.default_start())
        for _ in range(5):
            t = rng.standard_normal(2)
            assert eval_objective(from_file, t) == pytest.approx(eval_objective(builtin, t))
            np.testing.assert_allclose(eval_constraints(from_file, t)[0], eval_constraints(builtin, t)[0])

    def test_equal_bounds_make_an_equality(self, instance_dir):
        p = load_instance(os.path.join(instance_dir, "hs71.json"))
        assert (p.n_t, p.m_e, p.m_i) == (4, 1, 1)
        assert p.ineq_lower[0] == 25.0
        assert math.isinf(p.ineq_upper[0])
        np.testing.assert_array_equal(p.lower, np.ones(4))

    def test_one_sided_inequality(self, instance_dir):
        p = load_instance(os.path.join(instance_dir, "mpcc_basic.json"))
        assert (p.m_e, p.m_i) == (0, 1)
        assert p.ineq_lower[0] == -math.inf and p.ineq_upper[0] == 0.0

    def test_unconstrained(self, instance_dir):
        p = load_instance(os.path.join(instance_dir, "rosenbrock.json"))
        assert p.m == 0
        assert eval_objective(p, np.array([1.0, 1.0])) == 0.0

    def test_variable_names_are_kept(self, instance_dir):
        p = load_instance(os.path.join(instance_dir, "rosenbrock.json"))
        assert p.variable_names == ("x", "y")

    def test_missing_file(self, tmp_path):
        with pytest.raises(InstanceParseError, match="cannot read"):
            load_instance(tmp_path / "absent.json")


class TestExpressions:
    @pytest.mark.parametrize(
        "text, x, expected",
        [
            ("(- 1 x 2)", 0.5, -1.5),
            ("(- x)", 2.0, -2.0),
            ("(* 2 x x)", 3.0, 18.0),
            ("(/ 1 x)", 4.0, 0.25),
            ("(^ x 3)", 2.0, 8.0),
            ("(neg (inv x))", 0.5, -2.0),
            ("(exp (log x))", 1.7, 1.7),
            ("(+ (^ (sin x) 2) (^ (cos x) 2))", 0.3, 1.0),
            ("(sqrt x)", 9.0, 3.0),
            ("2.5", 1.0, 2.5),
        ],
    )
    def test_operators(self, text, x, expected):
        p = one_variable(text)
        assert eval_objective(p, np.array([x])) == pytest.approx(expected, rel=1e-12)

    def test_unsupported_operator(self):
        with pytest.raises(UnsupportedOperatorError) as info:
            one_variable("(tan x)")
        assert info.value.field == "objective"

    @pytest.mark.parametrize(
        "text, message",
        [
            ("(/ x)", "takes 2"),
            ("(+ x 1", "unbalanced"),
            ("(+ x 1))", "unbalanced"),
            ("x x", "exactly one"),
            ("()", "empty application"),
            ("(+ x z)", "unknown variable 'z'"),
            ("(* x inf)", "non-finite"),
            ("((+ x) 1)", "operator name"),
        ],
    )
    def test_malformed_expressions(self, text, message):
        with pytest.raises(InstanceParseError, match=message):
            one_variable(text)


class TestValidationErrors:
    def test_invalid_json_reports_line(self):
        with pytest.raises(InstanceParseError) as info:
            parse_instance('{\n  "variables": [\n  {"name": }\n]}')
        assert info.value.line == 3

    def test_bad_bounds_carry_field_and_line(self):
        text = '{\n  "name": "bad",\n  "variables": [\n    {"name": "a", "lower": 2, "upper": 1}\n  ]\n}'
        with pytest.raises(InstanceParseError) as info:
            parse_instance(text)
        assert info.value.field == "variables[0]"
        assert info.value.line == 3

    def test_bad_constraint_expression_located(self):
        text = (
            '{\n  "variables": [{"name": "a"}],\n  "objective": "a",\n  "constraints": [\n'
            '    {"expression": "(+ a b)", "upper": 1}\n  ]\n}'
        )
        with pytest.raises(InstanceParseError) as info:
            parse_instance(text)
        assert info.value.field == "constraints[0].expression"
        assert info.value.line == 5
        assert "line 5" in str(info.value)

    @pytest.mark.parametrize(
        "doc",
        [
            {"variables": []},
            {"variables": [{"name": "a"}, {"name": "a"}]},
            {"variables": [{"name": "1a"}]},
            {"variables": [{"name": "a"}], "constraints": [{"expression": "a"}]},
            {"variables": [{"name": "a"}], "constraints": [{"expression": "a", "lower": 3, "upper": 1}]},
            {"variables": [{"name": "a"}], "solver": "ipopt"},
        ],
    )
    def test_rejected_documents(self, doc):
        with pytest.raises(InstanceParseError):
            parse_instance(json.dumps(doc))

    def test_missing_variables_field(self):
        with pytest.raises(InstanceParseError) as info:
            parse_instance('{"objective": "1"}')
        assert info.value.field == "variables"
