"""
Batch runs: many networked trajectories in one mode, reduced to a BatchReport.

Each trajectory is independent. With workers > 1 they run on a thread pool;
results are collected in trajectory-index order so the report does not depend
on scheduling. A failing trajectory is logged and counted, never raised.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from config import settings
from controller.trajectory import Trajectory
from errors import RmpcError
from models import BatchReport, Mode
from netsim.networked import Telemetry, run_networked
from regions.cache import RegionCache
from regions.laws import AffineLaw
from synthesis.condensing import CondensedQP

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BatchItem:
    index: int
    x0: np.ndarray
    trajectory: Optional[Trajectory]
    telemetry: Optional[Telemetry]
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.trajectory is None or not self.trajectory.converged


@dataclass(frozen=True)
class BatchConfig:
    mode: Mode
    lam: float = 1.0
    max_steps: Optional[int] = None
    conv_tol: Optional[float] = None
    workers: Optional[int] = None


def _run_one(
    qp: CondensedQP, config: BatchConfig, cache: Optional[RegionCache], index: int, x0: np.ndarray
) -> BatchItem:
    try:
        trajectory, telemetry = run_networked(
            qp,
            qp.plant,
            config.mode,
            x0,
            config.max_steps,
            config.conv_tol,
            lam=config.lam,
            cache=cache,
        )
    except RmpcError as exc:
        logger.error("Trajectory %d from x0=%s failed: %s", index, x0, exc)
        return BatchItem(index, x0, None, None, str(exc))
    return BatchItem(index, x0, trajectory, telemetry)


def run_batch(
    qp: CondensedQP,
    x0s: np.ndarray,
    config: BatchConfig,
    cache: Optional[RegionCache] = None,
) -> list[BatchItem]:
    workers = settings.workers if config.workers is None else config.workers
    indices = range(len(x0s))
    if workers <= 1:
        items = [_run_one(qp, config, cache, i, x0s[i]) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            items = list(pool.map(lambda i: _run_one(qp, config, cache, i, x0s[i]), indices))

    failures = sum(item.failed for item in items)
    logger.info(
        "Batch complete: mode=%s lambda=%g trajectories=%d failures=%d",
        config.mode.value,
        config.lam,
        len(items),
        failures,
    )
    return items


def summarize(
    items: list[BatchItem], config: BatchConfig, *, problem: str, seed: int
) -> BatchReport:
    """Ordered reduction of the per-trajectory telemetry."""
    done = [item.telemetry for item in items if item.telemetry is not None]
    costs = 0.0
    for telemetry in done:
        costs += telemetry.total_cost
    return BatchReport(
        problem=problem,
        mode=config.mode,
        lam=config.lam,
        count=len(items),
        seed=seed,
        conv_tol=settings.conv_tol if config.conv_tol is None else config.conv_tol,
        max_steps=settings.max_steps if config.max_steps is None else config.max_steps,
        qps=sum(t.qp_count for t in done),
        flops=sum(t.local_flops for t in done),
        costs=costs,
        bytes_tx=sum(t.bytes_tx for t in done),
        messages=sum(t.messages for t in done),
        steps=sum(t.steps for t in done),
        failures=sum(item.failed for item in items),
    )


def discovered_laws(items: list[BatchItem]) -> list[AffineLaw]:
    """Distinct laws built during the batch, first occurrence wins."""
    seen: dict[str, AffineLaw] = {}
    for item in items:
        if item.trajectory is None:
            continue
        for law in item.trajectory.laws:
            seen.setdefault(law.key, law)
    return list(seen.values())
