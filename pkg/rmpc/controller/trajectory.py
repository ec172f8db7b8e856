"""
Closed-loop trajectory record and its CSV export.

One row per applied input: k, x_1..x_n, u_1..u_m, e, flops, cost, region.
States x(0..K) hold one more entry than the inputs; the final state is only
reachable through `states`.
"""

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from models import Provenance
from regions.base import ValidityRegion
from regions.laws import AffineLaw
from synthesis.condensing import Plant

# Violations smaller than this are rounding, not constraint breaches.
_BOUND_TOL = 1e-8


@dataclass(frozen=True)
class Trajectory:
    states: np.ndarray  # (K+1) x n
    inputs: np.ndarray  # K x m
    events: np.ndarray  # K, 1 where a QP was solved
    flops: np.ndarray  # K, membership flops charged at each step
    costs: np.ndarray  # K, objective along the applied law
    regions: tuple[ValidityRegion, ...]  # region in effect after each step
    laws: tuple[AffineLaw, ...]  # laws built at QP events, in order
    converged: bool

    @property
    def steps(self) -> int:
        return self.inputs.shape[0]

    @property
    def qp_count(self) -> int:
        return int(self.events.sum())

    @property
    def total_flops(self) -> int:
        return int(self.flops.sum())

    @property
    def total_cost(self) -> float:
        return float(self.costs.sum())

    @property
    def provenance(self) -> tuple[Provenance, ...]:
        return tuple(region.provenance for region in self.regions)

    def csv_header(self) -> list[str]:
        n, m = self.states.shape[1], self.inputs.shape[1]
        return (
            ["k"]
            + [f"x_{i + 1}" for i in range(n)]
            + [f"u_{i + 1}" for i in range(m)]
            + ["e", "flops", "cost", "region"]
        )

    def csv_rows(self) -> Iterable[list]:
        for k in range(self.steps):
            yield (
                [k]
                + [repr(float(v)) for v in self.states[k]]
                + [repr(float(v)) for v in self.inputs[k]]
                + [int(self.events[k]), int(self.flops[k]), repr(float(self.costs[k]))]
                + [self.regions[k].provenance.value]
            )


def empty_trajectory(x0: np.ndarray, m: int) -> Trajectory:
    """Zero-length trajectory of an initial state that is already converged."""
    return Trajectory(
        states=np.asarray(x0, dtype=float).reshape(1, -1),
        inputs=np.zeros((0, m)),
        events=np.zeros(0, dtype=int),
        flops=np.zeros(0, dtype=int),
        costs=np.zeros(0),
        regions=(),
        laws=(),
        converged=True,
    )


def constraint_violations(trajectory: Trajectory, plant: Plant, tol: Optional[float] = None) -> int:
    """Count of state and input components outside their bounds."""
    tol = _BOUND_TOL if tol is None else tol
    x, u = trajectory.states, trajectory.inputs
    state_hits = np.sum(x > plant.x_upper + tol) + np.sum(x < plant.x_lower - tol)
    input_hits = np.sum(u > plant.u_upper + tol) + np.sum(u < plant.u_lower - tol)
    return int(state_hits + input_hits)


class TrajectoryRecorder:
    """Collects per-step results and freezes them into a Trajectory."""

    def __init__(self, x0: np.ndarray):
        self.states = [np.asarray(x0, dtype=float)]
        self.inputs: list[np.ndarray] = []
        self.events: list[int] = []
        self.flops: list[int] = []
        self.costs: list[float] = []
        self.regions: list[ValidityRegion] = []
        self.laws: list[AffineLaw] = []

    def record(
        self,
        u: np.ndarray,
        x_next: np.ndarray,
        event: bool,
        flops: int,
        cost: float,
        law: AffineLaw,
        region: ValidityRegion,
    ) -> None:
        self.inputs.append(u)
        self.states.append(x_next)
        self.events.append(int(event))
        self.flops.append(flops)
        self.costs.append(cost)
        self.regions.append(region)
        if event:
            self.laws.append(law)

    def freeze(self, converged: bool, m: int) -> Trajectory:
        return Trajectory(
            states=np.vstack(self.states),
            inputs=np.vstack(self.inputs) if self.inputs else np.zeros((0, m)),
            events=np.array(self.events, dtype=int),
            flops=np.array(self.flops, dtype=int),
            costs=np.array(self.costs, dtype=float),
            regions=tuple(self.regions),
            laws=tuple(self.laws),
            converged=converged,
        )
