"""
Closed loop split over a central and a local node.

The local node asks for a law at x(0) before anything else and applies it at
k = 0 without a membership check. From then on it behaves exactly like the
single-process controller, so states and inputs match run_trajectory bit for bit.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from config import settings
from controller.trajectory import Trajectory, TrajectoryRecorder
from models import Mode
from netsim.bus import MessageBus
from netsim.nodes import CentralNode, LocalNode
from regions.cache import RegionCache
from synthesis.condensing import CondensedQP, Plant

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Telemetry:
    qp_count: int
    local_flops: int
    bytes_tx: int
    messages: int
    total_cost: float
    steps: int


def run_networked(
    qp: CondensedQP,
    plant: Plant,
    mode: Mode,
    x0: np.ndarray,
    max_steps: Optional[int] = None,
    conv_tol: Optional[float] = None,
    *,
    lam: float = 1.0,
    cache: Optional[RegionCache] = None,
) -> tuple[Trajectory, Telemetry]:
    max_steps = settings.max_steps if max_steps is None else max_steps
    conv_tol = settings.conv_tol if conv_tol is None else conv_tol
    x = np.asarray(x0, dtype=float)

    bus = MessageBus()
    central = CentralNode(qp, bus, mode, lam, cache)
    local = LocalNode(bus, central)
    local.request_law(x)

    recorder = TrajectoryRecorder(x)
    local_flops = 0
    converged = bool(np.linalg.norm(x) <= conv_tol)
    for k in range(0 if converged else max_steps):
        flops, event = 0, k == 0
        if k > 0:
            inside, flops = local.check(x)
            local_flops += flops
            if not inside:
                local.request_law(x)
                event = True
        u = local.control(x)
        cost = qp.objective(x, central.law.sequence(x))
        x = plant.step(x, u)
        recorder.record(u, x, event, flops, cost, central.law, central.region)
        if np.linalg.norm(x) <= conv_tol:
            converged = True
            break

    if not converged:
        logger.warning(
            "Networked trajectory from x0=%s did not converge within %d steps", x0, max_steps
        )
    trajectory = recorder.freeze(converged, plant.m)
    telemetry = Telemetry(
        qp_count=central.qp_count,
        local_flops=local_flops,
        bytes_tx=bus.bytes_tx,
        messages=bus.messages,
        total_cost=trajectory.total_cost,
        steps=trajectory.steps,
    )
    return trajectory, telemetry
