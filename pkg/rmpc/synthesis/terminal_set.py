"""
Maximal admissible terminal set of the LQR closed loop.

Gilbert–Tan iteration: start from a minimal description of the state and input
constraints expressed in x, then keep adding the constraints propagated t steps
ahead by A_cl until every new row is redundant with respect to what is already
there. Only rows that cut the current set are appended; rows added earlier are
not pruned again once later rows make them redundant, so the result is the
accumulated description.
"""

import logging
from typing import Optional

import numpy as np
from config import settings
from errors import NotFinitelyDetermined
from qp_solver.simplex import clean_rows, is_redundant, remove_redundant
from synthesis.polytope import Polytope

logger = logging.getLogger(__name__)


def terminal_set(
    A_cl: np.ndarray,
    X: Polytope,
    U: Polytope,
    K_lqr: np.ndarray,
    *,
    max_steps: Optional[int] = None,
    tol: Optional[float] = None,
) -> Polytope:
    """
    Return {x | C A_clᵗ x <= f for all t >= 0} with C x <= f encoding x ∈ X, K x ∈ U.

    Raises NotFinitelyDetermined if the propagation does not stop within
    `max_steps` (marginal stability or badly scaled data).
    """
    max_steps = settings.terminal_max_steps if max_steps is None else max_steps
    tol = settings.redundancy_tol if tol is None else tol

    radius = np.abs(np.linalg.eigvals(A_cl)).max()
    if radius >= 1.0:
        raise NotFinitelyDetermined(f"closed loop spectral radius {radius:.6f} is not below 1")

    C = np.vstack([X.T, U.T @ K_lqr])
    f = np.concatenate([X.d, U.d])
    current = remove_redundant(clean_rows(C, f, tol), tol)

    power = np.eye(A_cl.shape[0])
    for step in range(1, max_steps + 1):
        power = power @ A_cl
        propagated = C @ power
        fresh = [
            i
            for i in range(propagated.shape[0])
            if not is_redundant(current, propagated[i], f[i], tol)
        ]
        if not fresh:
            logger.info("Terminal set determined after %d steps with %d rows", step, current.rows)
            return current
        current = current.intersect(Polytope(propagated[fresh], f[fresh]))

    raise NotFinitelyDetermined(f"terminal set not determined within {max_steps} steps")
