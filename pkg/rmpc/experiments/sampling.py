"""
Random initial states: uniform over the state box, kept only if the QP is feasible.
"""

import logging
from typing import Optional

import numpy as np
from config import settings
from errors import InfeasibleQP, SamplingExhausted
from qp_solver.active_set import DualActiveSetSolver
from synthesis.condensing import CondensedQP

logger = logging.getLogger(__name__)

# Draws per RNG call; fixed so the accepted sequence depends on the seed only.
_CHUNK = 256


def _feasible(solver: DualActiveSetSolver, x: np.ndarray) -> bool:
    try:
        solver.solve(x)
    except InfeasibleQP:
        return False
    return True


def sample_initial_states(
    qp: CondensedQP,
    count: int,
    seed: int,
    *,
    max_draws: Optional[int] = None,
    min_acceptance: Optional[float] = None,
) -> np.ndarray:
    """
    Return `count` feasible initial states (count x n) drawn with a seeded generator.

    Raises SamplingExhausted when, after max_draws draws, the share of feasible
    draws is below min_acceptance. Above that rate sampling continues until
    `count` states are found.
    """
    max_draws = settings.sampling_max_draws if max_draws is None else max_draws
    min_acceptance = settings.sampling_min_acceptance if min_acceptance is None else min_acceptance
    plant = qp.plant
    rng = np.random.default_rng(seed)
    solver = DualActiveSetSolver(qp)

    accepted: list[np.ndarray] = []
    draws = 0
    while len(accepted) < count:
        rate = len(accepted) / max(draws, 1)
        if draws >= max_draws and rate < min_acceptance:
            raise SamplingExhausted(
                f"only {len(accepted)} of {count} feasible states in {draws} draws "
                f"(acceptance {rate:.2e}, minimum {min_acceptance:.2e})"
            )
        chunk = rng.uniform(plant.x_lower, plant.x_upper, size=(_CHUNK, plant.n))
        for x in chunk:
            draws += 1
            if _feasible(solver, x):
                accepted.append(x)
            if len(accepted) == count or draws == max_draws:
                break

    logger.info("Sampled %d feasible initial states from %d draws (seed %d)", count, draws, seed)
    return np.vstack(accepted) if accepted else np.zeros((0, plant.n))
