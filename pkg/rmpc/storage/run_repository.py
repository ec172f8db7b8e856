"""
Run-directory layout.

    <artifacts>/qp.npz             condensed QP (see files.save_qp)
    <artifacts>/synthesis.json     SynthesisSummary
    <run>/summary.json             BatchReport
    <run>/trajectories.csv         one line per trajectory
    <run>/traj_00000.csv ...       per-trajectory CSV, only with --save-trajectories
"""

import logging
from pathlib import Path

from controller.trajectory import Trajectory
from experiments.batch import BatchItem
from models import BatchReport, SynthesisSummary
from storage import files
from synthesis.condensing import CondensedQP

logger = logging.getLogger(__name__)

QP_FILE = "qp.npz"
SYNTHESIS_FILE = "synthesis.json"
SUMMARY_FILE = "summary.json"
TRAJECTORIES_FILE = "trajectories.csv"


def synthesis_summary(qp: CondensedQP) -> SynthesisSummary:
    return SynthesisSummary(
        n=qp.n,
        m=qp.m,
        N=qp.horizon,
        q=qp.q,
        variables=qp.variables,
        terminal_rows=qp.terminal_set.rows,
        rows=list(qp.row_tags),
    )


def save_artifacts(out_dir: Path, qp: CondensedQP) -> None:
    out_dir = Path(out_dir)
    files.save_qp(out_dir / QP_FILE, qp)
    files.write_model(out_dir / SYNTHESIS_FILE, synthesis_summary(qp))
    logger.info("Wrote synthesis artifacts to %s", out_dir)


def load_artifacts(artifacts_dir: Path) -> CondensedQP:
    return files.load_qp(Path(artifacts_dir) / QP_FILE)


def write_trajectory(path: Path, trajectory: Trajectory) -> None:
    files.write_csv(path, trajectory.csv_header(), trajectory.csv_rows())


def _trajectory_line(item: BatchItem) -> list:
    x0 = [repr(float(v)) for v in item.x0]
    if item.telemetry is None:
        return [item.index, 0, 0, 0, 0, 0, repr(0.0), "error"] + x0
    t = item.telemetry
    converged = "true" if item.trajectory.converged else "false"
    counts = [t.steps, t.qp_count, t.local_flops, t.bytes_tx, t.messages]
    return [item.index] + counts + [repr(t.total_cost), converged] + x0


def write_run(
    run_dir: Path, report: BatchReport, items: list[BatchItem], *, save_trajectories: bool = False
) -> None:
    run_dir = Path(run_dir)
    files.write_model(run_dir / SUMMARY_FILE, report)
    n = len(items[0].x0) if items else 0
    header = ["index", "steps", "qps", "flops", "bytes_tx", "messages", "cost", "converged"]
    header += [f"x0_{i + 1}" for i in range(n)]
    files.write_csv(run_dir / TRAJECTORIES_FILE, header, (_trajectory_line(item) for item in items))
    if save_trajectories:
        for item in items:
            if item.trajectory is not None:
                write_trajectory(run_dir / f"traj_{item.index:05d}.csv", item.trajectory)
    logger.info("Wrote run %s (%d trajectories)", run_dir, len(items))


def read_report(run_dir: Path) -> BatchReport:
    return files.read_model(Path(run_dir) / SUMMARY_FILE, BatchReport)
