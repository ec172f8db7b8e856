"""
Command-line entry point.

    python cli.py synth PROBLEM [--out DIR]
    python cli.py batch PROBLEM --mode MODE [--lambda L] [--count C] [--seed S] [--out DIR] ...
    python cli.py project PROBLEM CACHE
    python cli.py report RUN_DIR [RUN_DIR ...] [--csv PATH]
    python cli.py simulate PROBLEM --x0 X1 X2 ... [--mode MODE] [--out PATH]
    python cli.py compare PROBLEM --x0 X1 X2 ...
    python cli.py example NAME PATH

Logs go to stderr; results go to stdout. Exit code 2 means the problem file is
invalid or cannot be synthesized, 1 any other failure.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from config import settings
from controller.controller import run_trajectory
from errors import (
    DimensionMismatch,
    NoConvergence,
    NotFinitelyDetermined,
    ProjectionTooLarge,
    RmpcError,
    SingularGainSystem,
)
from experiments.batch import BatchConfig, discovered_laws, run_batch, summarize
from experiments.report import REPORT_HEADER, csv_rows, format_table, report_rows
from experiments.sampling import sample_initial_states
from models import Mode, ProblemSpec
from netsim.networked import run_networked
from problems import EXAMPLES
from pydantic import ValidationError
from regions.cache import RegionCache
from regions.laws import is_saturated
from regions.projection import projection_region_C
from storage import files, run_repository
from synthesis.condensing import CondensedQP, condense

logger = logging.getLogger(__name__)

_INVALID_PROBLEM = 2
_FAILURE = 1

# problem files that cannot be validated or synthesized exit with _INVALID_PROBLEM
_SYNTHESIS_ERRORS = (
    ValidationError,
    DimensionMismatch,
    NoConvergence,
    NotFinitelyDetermined,
    SingularGainSystem,
)


def _load(args: argparse.Namespace) -> tuple[ProblemSpec, CondensedQP]:
    spec = files.read_problem(Path(args.problem))
    artifacts = getattr(args, "artifacts", None)
    if artifacts:
        qp = run_repository.load_artifacts(Path(artifacts))
        logger.info("Loaded synthesis artifacts from %s", artifacts)
    else:
        qp = condense(spec)
    return spec, qp


def _lam(args: argparse.Namespace, spec: ProblemSpec) -> float:
    lam = spec.lam if args.lam is None else args.lam
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"lambda must lie in (0, 1], got {lam}")
    return lam


def _cache(args: argparse.Namespace) -> Optional[RegionCache]:
    return RegionCache.load(Path(args.cache)) if getattr(args, "cache", None) else None


def _x0(args: argparse.Namespace, qp: CondensedQP) -> np.ndarray:
    x0 = np.array(args.x0, dtype=float)
    if x0.shape != (qp.n,):
        raise DimensionMismatch(f"--x0 has {x0.size} entries, the plant has {qp.n} states")
    return x0


# ── commands ─────────────────────────────────────────────────────────────────


def cmd_synth(args: argparse.Namespace) -> int:
    _, qp = _load(args)
    if args.out:
        run_repository.save_artifacts(Path(args.out), qp)
    print(f"q={qp.q} vars={qp.variables}")
    return 0


def cmd_batch(args: argparse.Namespace) -> int:
    spec, qp = _load(args)
    mode = Mode(args.mode)
    if args.origin:
        x0s = np.zeros((args.count, qp.n))
    else:
        x0s = sample_initial_states(qp, args.count, args.seed)
    config = BatchConfig(mode, _lam(args, spec), args.max_steps, args.conv_tol, args.workers)
    items = run_batch(qp, x0s, config, _cache(args))
    report = summarize(items, config, problem=Path(args.problem).stem, seed=args.seed)
    if args.out:
        run_repository.write_run(
            Path(args.out), report, items, save_trajectories=args.save_trajectories
        )
    print(
        f"{report.label}: qps={report.qps} flops={report.flops} costs={report.costs:.6f} "
        f"steps={report.steps} failures={report.failures}"
    )
    return 0


def cmd_project(args: argparse.Namespace) -> int:
    _, qp = _load(args)
    cache_path = Path(args.cache_file)
    cache = RegionCache.load(cache_path) if cache_path.exists() else RegionCache()

    x0s = sample_initial_states(qp, args.count, args.seed)
    items = run_batch(qp, x0s, BatchConfig(Mode.suboptimal, workers=args.workers))
    laws = discovered_laws(items)
    plant = qp.plant
    saturated = [law for law in laws if is_saturated(law, plant.u_lower, plant.u_upper)]
    logger.info("Scouting run found %d laws, %d saturated", len(laws), len(saturated))

    for law in saturated:
        if law.key in cache:
            continue
        try:
            cache.put(law, projection_region_C(qp, law, args.elim_cap, override=args.override))
        except ProjectionTooLarge as exc:
            logger.warning("Skipping projection for law [%s]: %s", law.key, exc)

    cache.save(cache_path)
    print(f"laws={len(laws)} saturated={len(saturated)} cached={len(cache)}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    reports = [run_repository.read_report(Path(run_dir)) for run_dir in args.run_dirs]
    rows = report_rows(reports)
    if args.csv:
        files.write_csv(Path(args.csv), REPORT_HEADER, csv_rows(rows))
    print(format_table(rows))
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    spec, qp = _load(args)
    trajectory = run_trajectory(
        qp,
        qp.plant,
        Mode(args.mode),
        _x0(args, qp),
        args.max_steps,
        args.conv_tol,
        lam=_lam(args, spec),
        cache=_cache(args),
    )
    if args.out:
        run_repository.write_trajectory(Path(args.out), trajectory)
    print(
        f"steps={trajectory.steps} qps={trajectory.qp_count} flops={trajectory.total_flops} "
        f"cost={trajectory.total_cost:.6f} converged={str(trajectory.converged).lower()}"
    )
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    spec, qp = _load(args)
    x0 = _x0(args, qp)
    lam, cache = _lam(args, spec), _cache(args)
    print("mode             steps  qps  flops  bytes_tx  cost")
    for mode in Mode:
        trajectory, telemetry = run_networked(qp, qp.plant, mode, x0, lam=lam, cache=cache)
        print(
            f"{mode.value:<16} {telemetry.steps:>5} {telemetry.qp_count:>4} "
            f"{telemetry.local_flops:>6} {telemetry.bytes_tx:>9} {telemetry.total_cost:.6f}"
        )
    return 0


def cmd_example(args: argparse.Namespace) -> int:
    files.write_problem(Path(args.path), EXAMPLES[args.name]())
    print(f"wrote {args.name} to {args.path}")
    return 0


# ── parser ───────────────────────────────────────────────────────────────────


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.optimal.value)
    parser.add_argument("--lambda", dest="lam", type=float, default=None)
    parser.add_argument("--conv-tol", type=float, default=settings.conv_tol)
    parser.add_argument("--max-steps", type=int, default=settings.max_steps)
    parser.add_argument("--cache", help="region cache written by the project command")
    parser.add_argument("--artifacts", help="directory written by synth --out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmpc",
        description="Event-triggered regional MPC: synthesis, simulation and batch experiments.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="condense a problem file and report its size")
    synth.add_argument("problem")
    synth.add_argument("--out", help="write qp.npz and synthesis.json here")
    synth.set_defaults(handler=cmd_synth)

    batch = commands.add_parser("batch", help="trajectories from random feasible initial states")
    batch.add_argument("problem")
    _add_run_options(batch)
    batch.add_argument("--count", type=int, default=200)
    batch.add_argument("--seed", type=int, default=0)
    batch.add_argument("--out", help="run directory")
    batch.add_argument("--origin", action="store_true", help="start every trajectory at x0 = 0")
    batch.add_argument("--workers", type=int, default=settings.workers)
    batch.add_argument("--save-trajectories", action="store_true")
    batch.set_defaults(handler=cmd_batch)

    project = commands.add_parser("project", help="precompute projected regions for saturated laws")
    project.add_argument("problem")
    project.add_argument("cache_file")
    project.add_argument("--count", type=int, default=50, help="scouting trajectories")
    project.add_argument("--seed", type=int, default=0)
    project.add_argument("--elim-cap", type=int, default=settings.projection_elim_cap)
    project.add_argument("--override", action="store_true", help="ignore the elimination cap")
    project.add_argument("--workers", type=int, default=settings.workers)
    project.add_argument("--artifacts", help="directory written by synth --out")
    project.set_defaults(handler=cmd_project)

    report = commands.add_parser("report", help="compare batch runs against the optimal run")
    report.add_argument("run_dirs", nargs="+")
    report.add_argument("--csv", help="also write the table as CSV")
    report.set_defaults(handler=cmd_report)

    simulate = commands.add_parser("simulate", help="one closed-loop trajectory")
    simulate.add_argument("problem")
    simulate.add_argument("--x0", type=float, nargs="+", required=True)
    _add_run_options(simulate)
    simulate.add_argument("--out", help="trajectory CSV")
    simulate.set_defaults(handler=cmd_simulate)

    compare = commands.add_parser("compare", help="all modes from the same initial state")
    compare.add_argument("problem")
    compare.add_argument("--x0", type=float, nargs="+", required=True)
    compare.add_argument("--lambda", dest="lam", type=float, default=None)
    compare.add_argument("--cache")
    compare.add_argument("--artifacts")
    compare.set_defaults(handler=cmd_compare)

    example = commands.add_parser("example", help="write a built-in example problem file")
    example.add_argument("name", choices=sorted(EXAMPLES))
    example.add_argument("path")
    example.set_defaults(handler=cmd_example)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=settings.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
        stream=sys.stderr,
    )
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except _SYNTHESIS_ERRORS as exc:
        print(f"invalid problem: {exc}", file=sys.stderr)
        return _INVALID_PROBLEM
    except (RmpcError, ValueError, OSError) as exc:
        logger.error("%s failed: %s", args.command, exc)
        return _FAILURE


if __name__ == "__main__":
    sys.exit(main())
