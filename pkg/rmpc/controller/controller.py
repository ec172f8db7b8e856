"""
Event-triggered feedback.

The current law is reused as long as the state stays inside its validity
region; otherwise a QP is solved, a new law is read off its active set and a
new region is built for it. Which region depends on the mode:

  optimal           optimal polytope P*
  suboptimal        closed-form feasibility polytope F ∩ stability quadric
  suboptimal-proj   as suboptimal, with the cached projection C in place of F
                    for saturated laws

Suboptimal modes fall back to P* when the closed loop of the new law is not
invertible.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from config import settings
from controller.trajectory import Trajectory, TrajectoryRecorder, empty_trajectory
from errors import InfeasibleQP, InfeasibleState, SingularClosedLoop
from models import Mode, Provenance
from qp_solver.active_set import DualActiveSetSolver
from regions.base import ValidityRegion, membership
from regions.cache import RegionCache
from regions.extended import ExtendedRegion
from regions.laws import AffineLaw, feasibility_polytope_F, is_saturated, law_for_active_set
from regions.optimal import OptimalPolytope
from regions.quadric import stability_quadric
from synthesis.condensing import CondensedQP, Plant
from synthesis.polytope import Polytope

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ControllerState:
    law: AffineLaw
    region: ValidityRegion
    mode: Mode
    lam: float


@dataclass(frozen=True)
class StepResult:
    u: np.ndarray
    state: ControllerState
    event: bool
    flops: int
    cost: float


def build_region(
    qp: CondensedQP,
    law: AffineLaw,
    optimal: Polytope,
    mode: Mode,
    lam: float,
    cache: Optional[RegionCache] = None,
) -> ValidityRegion:
    """Validity region of a freshly built law for the given mode."""
    if not mode.extends_regions:
        return OptimalPolytope(optimal)
    plant = qp.plant
    try:
        quadric = stability_quadric(qp, law, plant.A, plant.B, lam)
    except SingularClosedLoop as exc:
        logger.debug("Law [%s] falls back to P*: %s", law.key, exc)
        return OptimalPolytope(optimal)

    saturated = is_saturated(law, plant.u_lower, plant.u_upper)
    if mode.uses_projections and cache is not None and saturated:
        projected = cache.get(law)
        if projected is not None:
            return ExtendedRegion(projected, quadric.inequality, Provenance.projected_C)
    return ExtendedRegion(feasibility_polytope_F(qp, law.active), quadric.inequality)


class LawBuilder:
    """Solves the QP at an event state and turns its active set into (law, region)."""

    def __init__(
        self, qp: CondensedQP, mode: Mode, lam: float = 1.0, cache: Optional[RegionCache] = None
    ):
        self.qp = qp
        self.mode = mode
        self.lam = lam
        self.cache = cache
        self._solver = DualActiveSetSolver(qp)

    def at(self, x: np.ndarray) -> tuple[AffineLaw, ValidityRegion]:
        try:
            solution = self._solver.solve(x)
        except InfeasibleQP as exc:
            logger.error("QP event at infeasible state x=%s: %s", x, exc)
            raise InfeasibleState(f"state {x} is outside the feasible set") from exc
        law, optimal = law_for_active_set(self.qp, solution.active)
        region = build_region(self.qp, law, optimal, self.mode, self.lam, self.cache)
        logger.debug(
            "New law [%s] with %s region (%d flops per check)",
            law.key,
            region.provenance.value,
            region.flops,
        )
        return law, region


class Controller:
    def __init__(
        self, qp: CondensedQP, mode: Mode, lam: float = 1.0, cache: Optional[RegionCache] = None
    ):
        self.qp = qp
        self.builder = LawBuilder(qp, mode, lam, cache)

    def step(self, state: Optional[ControllerState], x: np.ndarray) -> StepResult:
        """
        One sampling instant. `state` is None before the first law exists, in
        which case a QP is always solved and no membership flops are charged.
        """
        flops = 0
        if state is not None:
            inside, flops = membership(state.region, x)
            if inside:
                u, cost = state.law.feedback(x), self._cost(state.law, x)
                return StepResult(u, state, False, flops, cost)

        law, region = self.builder.at(x)
        new_state = ControllerState(law, region, self.builder.mode, self.builder.lam)
        return StepResult(law.feedback(x), new_state, True, flops, self._cost(law, x))

    def _cost(self, law: AffineLaw, x: np.ndarray) -> float:
        return self.qp.objective(x, law.sequence(x))


def run_trajectory(
    qp: CondensedQP,
    plant: Plant,
    mode: Mode,
    x0: np.ndarray,
    max_steps: Optional[int] = None,
    conv_tol: Optional[float] = None,
    *,
    lam: float = 1.0,
    cache: Optional[RegionCache] = None,
) -> Trajectory:
    """
    Simulate x(k+1) = A x(k) + B u(k) under event-triggered feedback until
    ‖x‖₂ <= conv_tol or max_steps inputs have been applied.

    Hitting max_steps is not an error: the trajectory comes back with
    converged=False. InfeasibleState aborts the trajectory.
    """
    max_steps = settings.max_steps if max_steps is None else max_steps
    conv_tol = settings.conv_tol if conv_tol is None else conv_tol
    x = np.asarray(x0, dtype=float)
    if np.linalg.norm(x) <= conv_tol:
        return empty_trajectory(x, plant.m)

    controller = Controller(qp, mode, lam, cache)
    recorder = TrajectoryRecorder(x)
    state: Optional[ControllerState] = None
    converged = False
    for _ in range(max_steps):
        result = controller.step(state, x)
        state = result.state
        x = plant.step(x, result.u)
        recorder.record(
            result.u, x, result.event, result.flops, result.cost, state.law, state.region
        )
        if np.linalg.norm(x) <= conv_tol:
            converged = True
            break

    if not converged:
        logger.warning("Trajectory from x0=%s did not converge within %d steps", x0, max_steps)
    return recorder.freeze(converged, plant.m)
