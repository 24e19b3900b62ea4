"""
CLI for the NCL solver

    nclsolver solve hs6 --kkt k2r --tol 1e-8 --log iterations.csv
    nclsolver solve instances/hs71.json
    nclsolver bench --family mpcc --kkt k2r --kkt k1s --out bench.csv
    nclsolver list --family regular
    nclsolver validate
"""

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from ... import __version__
from ...core.config import KKT_CHOICES, config
from ...core.exceptions import NclError
from ...model import NcoProblem
from ...ncl import SolveReport, SolverOptions, SolveStatus, solve
from ...problems import Family, build, get_instance, list_instances, load_instance, parse_instance_ref

console = Console()
logger = logging.getLogger(__name__)

EXIT_CODES: Dict[SolveStatus, int] = {
    SolveStatus.OPTIMAL: 0,
    SolveStatus.ACCEPTABLE: 1,
    SolveStatus.INFEASIBLE: 2,
    SolveStatus.ITERATION_LIMIT: 3,
    SolveStatus.STEP_FAILURE: 5,
}
EXIT_INPUT_ERROR = 4
EXIT_INTERNAL_ERROR = 5

BENCH_FLAGS: Dict[SolveStatus, int] = {SolveStatus.OPTIMAL: 1, SolveStatus.ACCEPTABLE: 2}

BENCH_COLUMNS = ["instance", "family", "kkt", "flag", "status", "outer", "it", "objective", "lin", "total"]


class RunConfig(BaseModel):
    """One solve request; exactly one of `instance` (registry reference) or `file` is set"""

    model_config = ConfigDict(extra="forbid")

    instance: Optional[str] = None
    file: Optional[Path] = None
    kkt: str = "k2r"
    tol: float = Field(1e-8, gt=0)
    max_outer: int = Field(50, ge=1)
    max_inner: int = Field(1000, ge=1)
    pivot_eps: float = Field(1e-10, ge=0)
    scaling: bool = True
    log: Optional[Path] = None
    outer_log: Optional[Path] = None
    seed: Optional[int] = None

    @model_validator(mode="after")
    def _check(self) -> "RunConfig":
        if (self.instance is None) == (self.file is None):
            raise ValueError("Give exactly one instance source: a registry name or an instance file")
        if self.kkt not in KKT_CHOICES:
            raise ValueError(f"kkt must be one of {', '.join(KKT_CHOICES)}")
        return self

    @classmethod
    def from_target(cls, target: str, **fields) -> "RunConfig":
        """Targets ending in .json or containing a path separator are files, the rest registry references"""
        looks_like_file = target.endswith(".json") or "/" in target or "\\" in target
        if looks_like_file:
            return cls(file=Path(target), **fields)
        return cls(instance=target, **fields)

    def solver_options(self) -> SolverOptions:
        return SolverOptions.from_config(
            kkt=self.kkt,
            tol=self.tol,
            max_outer=self.max_outer,
            max_inner=self.max_inner,
            pivot_eps=self.pivot_eps,
            scaling=self.scaling,
        )

    def load_problem(self) -> NcoProblem:
        if self.file is not None:
            return load_instance(self.file)
        name, params = parse_instance_ref(self.instance or "")
        spec = get_instance(name)
        if self.seed is not None and "seed" in spec.defaults:
            params.setdefault("seed", self.seed)
        return build(name, **params)


def setup_logging(verbosity: int = 0) -> None:
    """RichHandler on stderr at LOG_LEVEL (-v INFO, -vv DEBUG) plus an optional LOG_FILE handler"""
    level = getattr(logging, config.LOG_LEVEL.upper(), logging.WARNING)
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = min(level, logging.INFO)

    handlers: List[logging.Handler] = [RichHandler(console=Console(stderr=True), show_path=False)]
    if config.LOG_FILE:
        file_handler = logging.FileHandler(config.LOG_FILE)
        file_handler.setFormatter(logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s"))
        handlers.append(file_handler)
    logging.basicConfig(level=level, format="%(message)s", datefmt="[%X]", handlers=handlers, force=True)


# Display helpers


def display_report(report: SolveReport) -> None:
    """Summary table of a finished solve"""
    color = "green" if report.status is SolveStatus.OPTIMAL else "yellow" if report.converged else "red"
    table = Table(title=f"{report.problem} ({report.formulation.upper()})")
    table.add_column("Metric", style="cyan")
    table.add_column("Value", style="green")

    table.add_row("Status", f"[{color}]{report.status.value}[/{color}]")
    table.add_row("Objective", f"{report.objective:.10g}")
    table.add_row("Primal residual |r|", f"{report.primal_residual:.3e}")
    table.add_row("Dual residual", f"{report.dual_residual:.3e}")
    table.add_row("Constraint violation", f"{report.constraint_violation:.3e}")
    table.add_row("Outer / inner iterations", f"{report.outer_iterations} / {report.inner_iterations}")
    table.add_row("Final rho / mu", f"{report.rho:.1e} / {report.mu:.1e}")
    table.add_row("Factorizations", str(report.stats.factorizations))
    table.add_row("Perturbed pivots", str(report.stats.perturbed_pivots))
    table.add_row("Linear solver time", f"{report.stats.total_time:.3f} s")
    table.add_row("Total time", f"{report.solve_time:.3f} s")
    console.print(table)


def display_frame(frame: pd.DataFrame, title: str) -> None:
    table = Table(title=title)
    for column in frame.columns:
        table.add_column(str(column))
    for row in frame.itertuples(index=False):
        table.add_row(*(f"{v:.4g}" if isinstance(v, float) else str(v) for v in row))
    console.print(table)


# Commands


def cmd_solve(args: argparse.Namespace) -> int:
    """Solve one instance; the exit code follows the final status"""
    try:
        run = RunConfig.from_target(
            args.instance,
            kkt=args.kkt,
            tol=args.tol,
            max_outer=args.max_outer,
            max_inner=args.max_inner,
            pivot_eps=args.pivot_eps,
            scaling=not args.no_scaling,
            log=args.log,
            outer_log=args.outer_log,
            seed=args.seed,
        )
        problem = run.load_problem()
    except (NclError, ValidationError) as e:
        console.print(f"[red]Input error:[/red] {e}")
        return EXIT_INPUT_ERROR

    report = solve(problem, run.solver_options())
    display_report(report)

    if run.log is not None:
        path = report.write_iterations(run.log)
        console.print(f"[dim]Iteration log written to {path}[/dim]")
    if run.outer_log is not None:
        run.outer_log.parent.mkdir(parents=True, exist_ok=True)
        report.outer_frame().to_csv(run.outer_log, index=False)
        console.print(f"[dim]Outer log written to {run.outer_log}[/dim]")
    return EXIT_CODES[report.status]


def bench_row(name: str, family: str, kkt: str, tol: float) -> dict:
    """One benchmark row; flag is 1 for optimal, 2 for acceptable and 0 otherwise, failures included"""
    row = {"instance": name, "family": family, "kkt": kkt}
    try:
        report = solve(build(name), SolverOptions.from_config(kkt=kkt, tol=tol))
    except Exception as e:
        logger.warning(f"Benchmark run {name} / {kkt} failed: {e}")
        failed = {"flag": 0, "status": "error", "outer": 0, "it": 0}
        return {**row, **failed, "objective": float("nan"), "lin": 0.0, "total": 0.0}
    return {
        **row,
        "flag": BENCH_FLAGS.get(report.status, 0),
        "status": report.status.value,
        "outer": report.outer_iterations,
        "it": report.inner_iterations,
        "objective": report.objective,
        "lin": report.stats.total_time,
        "total": report.solve_time,
    }


def run_bench(
    family: Optional[str] = None,
    formulations: Sequence[str] = ("k2r",),
    workers: int = 1,
    tol: Optional[float] = None,
) -> pd.DataFrame:
    """Benchmark table over the registry, one row per (instance, formulation), ordered by instance name"""
    tol = tol if tol is not None else config.TOLERANCE
    jobs = [(spec.name, spec.family.value, kkt) for spec in list_instances(family) for kkt in formulations]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda job: bench_row(*job, tol), jobs))
    else:
        rows = [bench_row(*job, tol) for job in jobs]
    frame = pd.DataFrame(rows, columns=BENCH_COLUMNS)
    return frame.sort_values(["instance", "kkt"], kind="stable").reset_index(drop=True)


def cmd_bench(args: argparse.Namespace) -> int:
    formulations = args.kkt or ["k2r"]
    frame = run_bench(args.family, formulations, args.workers, args.tol)
    display_frame(frame, f"Benchmark ({args.family or 'all families'})")
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(args.out, index=False)
        console.print(f"[dim]Benchmark table written to {args.out}[/dim]")
    return 0


def registry_listing(family: Optional[str] = None) -> pd.DataFrame:
    """Registry entries with their family tags and the sizes of the default builds"""
    rows = []
    for spec in list_instances(family):
        problem = spec.build()
        rows.append(
            {
                "name": spec.name,
                "family": spec.family.value,
                "n_t": problem.n_t,
                "m_e": problem.m_e,
                "m_i": problem.m_i,
                "expected": spec.expected_status,
                "reference": spec.reference(),
            }
        )
    return pd.DataFrame(rows, columns=["name", "family", "n_t", "m_e", "m_i", "expected", "reference"])


def cmd_list(args: argparse.Namespace) -> int:
    display_frame(registry_listing(args.family), "Registered instances")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    status = config.validate_config()
    if not status["valid"]:
        console.print("[red]Configuration issues found:[/red]")
        for issue in status["issues"]:
            console.print(f"   • {issue}")
        return EXIT_INPUT_ERROR

    body = "\n".join(f"{key}: {value}" for key, value in status["config"].items())
    console.print(Panel.fit(body, title="Configuration validated", border_style="green"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nclsolver", description="NCL augmented-Lagrangian solver")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logs")
    sub = parser.add_subparsers(dest="command", required=True)

    families = [f.value for f in Family]

    p_solve = sub.add_parser("solve", help="Solve a registry instance or an instance file")
    p_solve.add_argument("instance", help="Registry reference such as 'ncvxqp(n=40)' or a .json instance file")
    p_solve.add_argument("--kkt", choices=KKT_CHOICES, default=config.KKT_FORMULATION)
    p_solve.add_argument("--tol", type=float, default=config.TOLERANCE)
    p_solve.add_argument("--max-outer", type=int, default=config.MAX_OUTER)
    p_solve.add_argument("--max-inner", type=int, default=config.MAX_INNER)
    p_solve.add_argument("--pivot-eps", type=float, default=config.PIVOT_EPS)
    p_solve.add_argument("--no-scaling", action="store_true", default=not config.SCALING)
    p_solve.add_argument("--log", "--csv", dest="log", type=Path, help="Per-iteration CSV log")
    p_solve.add_argument("--outer-log", type=Path, help="Per-outer-iteration CSV log")
    p_solve.add_argument("--seed", type=int, help="Seed for randomized families")
    p_solve.set_defaults(handler=cmd_solve)

    p_bench = sub.add_parser("bench", help="Run the registry under one or more formulations")
    p_bench.add_argument("--family", choices=families)
    p_bench.add_argument("--kkt", choices=KKT_CHOICES, action="append", help="Repeat for several formulations")
    p_bench.add_argument("--workers", type=int, default=config.BENCH_WORKERS)
    p_bench.add_argument("--tol", type=float, default=config.TOLERANCE)
    p_bench.add_argument("--out", type=Path, help="CSV output path")
    p_bench.set_defaults(handler=cmd_bench)

    p_list = sub.add_parser("list", help="List registered instances")
    p_list.add_argument("--family", choices=families)
    p_list.set_defaults(handler=cmd_list)

    p_validate = sub.add_parser("validate", help="Check the environment configuration")
    p_validate.set_defaults(handler=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)
    try:
        return args.handler(args)
    except NclError as e:
        console.print(f"[red]Input error:[/red] {e}")
        return EXIT_INPUT_ERROR
    except Exception as e:
        logger.exception(f"Internal failure: {e}")
        return EXIT_INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
