"""
Tests for the command-line interface that do not run a full solve
"""

import importlib
from types import SimpleNamespace
from pathlib import Path

import pytest
from pydantic import ValidationError

from nclsolver.interfaces.cli import EXIT_CODES, RunConfig, build_parser, main
from nclsolver.interfaces.cli.main import BENCH_COLUMNS, bench_row, registry_listing, run_bench
from nclsolver.ncl import SolveStatus

cli_module = importlib.import_module("nclsolver.interfaces.cli.main")

pytestmark = pytest.mark.unit


class TestRunConfig:
    def test_registry_target(self):
        run = RunConfig.from_target("ncvxqp(n=40)")
        assert run.instance == "ncvxqp(n=40)" and run.file is None

    @pytest.mark.parametrize("target", ["instances/hs6.json", "hs6.json", "data\\hs71.json"])
    def test_file_target(self, target):
        run = RunConfig.from_target(target)
        assert run.file == Path(target) and run.instance is None

    @pytest.mark.parametrize(
        "fields",
        [
            {},
            {"instance": "hs6", "file": "hs6.json"},
            {"instance": "hs6", "kkt": "k3"},
            {"instance": "hs6", "tol": 0.0},
            {"instance": "hs6", "max_inner": 0},
            {"instance": "hs6", "pivot_eps": -1.0},
            {"instance": "hs6", "solver": "other"},
        ],
    )
    def test_rejected(self, fields):
        with pytest.raises(ValidationError):
            RunConfig(**fields)

    def test_seed_reaches_randomized_builders(self):
        problem = RunConfig(instance="eq-qp(n=10, m=3)", seed=5).load_problem()
        assert problem.name == "eq-qp(n=10, m=3, seed=5)"

    def test_seed_in_reference_wins(self):
        problem = RunConfig(instance="eq-qp(n=10, m=3, seed=2)", seed=5).load_problem()
        assert problem.name.endswith("seed=2)")

    def test_seed_ignored_for_fixed_instances(self):
        assert RunConfig(instance="hs6", seed=5).load_problem().name == "hs6"

    def test_solver_options(self):
        opts = RunConfig(instance="hs6", kkt="k1s", tol=1e-6, max_outer=9, scaling=False).solver_options()
        assert (opts.kkt, opts.tol, opts.max_outer, opts.scaling) == ("k1s", 1e-6, 9, False)


class TestExitCodes:
    def test_every_status_has_a_code(self):
        assert set(EXIT_CODES) == set(SolveStatus)

    def test_codes(self):
        assert EXIT_CODES[SolveStatus.OPTIMAL] == 0
        assert EXIT_CODES[SolveStatus.ACCEPTABLE] == 1
        assert EXIT_CODES[SolveStatus.INFEASIBLE] == 2
        assert EXIT_CODES[SolveStatus.ITERATION_LIMIT] == 3
        assert EXIT_CODES[SolveStatus.STEP_FAILURE] == 5

    @pytest.mark.parametrize("target", ["hs999", "hs6(n=3)", "ncvxqp(n=4, m=4)", "missing/absent.json"])
    def test_input_errors(self, target):
        assert main(["solve", target]) == 4

    def test_malformed_instance_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"variables": [{"name": "x"}], "objective": "(tan x)"}')
        assert main(["solve", str(path)]) == 4

    def test_internal_failure(self, monkeypatch):
        def broken(*args, **kwargs):
            raise RuntimeError("boom")

        monkeypatch.setattr(cli_module, "solve", broken)
        assert main(["solve", "hs6"]) == 5

    def test_argument_errors_exit_through_argparse(self):
        with pytest.raises(SystemExit) as info:
            main(["solve", "hs6", "--kkt", "k9"])
        assert info.value.code == 2


class TestCommands:
    def test_parser_subcommands(self):
        args = build_parser().parse_args(["bench", "--kkt", "k2", "--kkt", "k1s", "--family", "mpcc"])
        assert args.kkt == ["k2", "k1s"] and args.family == "mpcc"

    def test_validate(self):
        assert main(["validate"]) == 0

    def test_list(self):
        assert main(["list", "--family", "opf-toy"]) == 0

    def test_registry_listing(self):
        frame = registry_listing("mpcc")
        assert list(frame.columns) == ["name", "family", "n_t", "m_e", "m_i", "expected", "reference"]
        assert len(frame) == 5
        chain = frame.set_index("name").loc["mpcc-chain"]
        assert (chain.n_t, chain.m_e, chain.m_i) == (10, 0, 5)
        assert chain.reference == "mpcc-chain(n=5)"

    def test_empty_bench_has_header(self):
        frame = run_bench("mpcc", [])
        assert list(frame.columns) == BENCH_COLUMNS
        assert frame.empty

    def test_failed_bench_row(self, monkeypatch):
        def broken(*args, **kwargs):
            raise RuntimeError("boom")

        monkeypatch.setattr(cli_module, "solve", broken)
        row = bench_row("hs6", "regular", "k2r", 1e-6)
        assert row["flag"] == 0 and row["status"] == "error"
        assert set(row) == set(BENCH_COLUMNS)

    @pytest.mark.parametrize(
        "status, flag",
        [
            (SolveStatus.OPTIMAL, 1),
            (SolveStatus.ACCEPTABLE, 2),
            (SolveStatus.ITERATION_LIMIT, 0),
            (SolveStatus.INFEASIBLE, 0),
            (SolveStatus.STEP_FAILURE, 0),
        ],
    )
    def test_bench_flag_follows_status(self, monkeypatch, status, flag):
        report = SimpleNamespace(
            status=status,
            outer_iterations=4,
            inner_iterations=17,
            objective=2.5,
            stats=SimpleNamespace(total_time=0.01),
            solve_time=0.1,
        )
        monkeypatch.setattr(cli_module, "solve", lambda *args, **kwargs: report)
        row = bench_row("hs6", "regular", "k2r", 1e-6)
        assert row["flag"] == flag
        assert row["status"] == status.value
        assert (row["outer"], row["it"], row["lin"]) == (4, 17, 0.01)
