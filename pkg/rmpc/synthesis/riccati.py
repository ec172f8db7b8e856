"""
Discrete-time algebraic Riccati equation and the LQR gain derived from it.

The DARE is solved by iterating the Riccati recursion from P₀ = Q until two
successive iterates agree; for stabilizable data the recursion converges
monotonically to the stabilizing solution.
"""

import logging
from typing import Optional

import numpy as np
from config import settings
from errors import NoConvergence, SingularGainSystem

logger = logging.getLogger(__name__)

# Largest condition number accepted for R + B'PB.
_GAIN_COND_LIMIT = 1e12


def _riccati_map(
    P: np.ndarray, A: np.ndarray, B: np.ndarray, Q: np.ndarray, R: np.ndarray
) -> np.ndarray:
    BtP = B.T @ P
    gain_system = R + BtP @ B
    P_next = Q + A.T @ P @ A - A.T @ P @ B @ np.linalg.solve(gain_system, BtP @ A)
    return 0.5 * (P_next + P_next.T)


def riccati_residual(
    P: np.ndarray, A: np.ndarray, B: np.ndarray, Q: np.ndarray, R: np.ndarray
) -> float:
    """Max-norm of P minus the Riccati map applied to P."""
    return float(np.abs(P - _riccati_map(P, A, B, Q, R)).max())


def solve_dare(
    A: np.ndarray,
    B: np.ndarray,
    Q: np.ndarray,
    R: np.ndarray,
    *,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> np.ndarray:
    """
    Return the stabilizing solution P of P = Q + A'PA − A'PB(R + B'PB)⁻¹B'PA.

    Raises NoConvergence if the iteration blows up or does not settle within
    the iteration cap, which signals non-stabilizable data.
    """
    tol = settings.dare_tol if tol is None else tol
    max_iter = settings.dare_max_iter if max_iter is None else max_iter

    P = np.array(Q, dtype=float)
    for iteration in range(1, max_iter + 1):
        P_next = _riccati_map(P, A, B, Q, R)
        if not np.all(np.isfinite(P_next)):
            raise NoConvergence(f"Riccati iteration diverged after {iteration} steps")
        step = np.abs(P_next - P).max()
        P = P_next
        if step <= tol * max(1.0, np.abs(P).max()):
            break
    else:
        raise NoConvergence(f"Riccati iteration did not converge within {max_iter} steps")

    residual = riccati_residual(P, A, B, Q, R)
    if residual > 1e-9 * max(1.0, np.linalg.norm(P)):
        raise NoConvergence(f"Riccati residual {residual:.3e} too large")
    logger.debug("DARE converged after %d iterations (residual %.2e)", iteration, residual)
    return P


def lqr_gain(A: np.ndarray, B: np.ndarray, R: np.ndarray, P: np.ndarray) -> np.ndarray:
    """K = −(R + B'PB)⁻¹B'PA, checked to stabilize A + BK."""
    gain_system = R + B.T @ P @ B
    if np.linalg.cond(gain_system) > _GAIN_COND_LIMIT:
        raise SingularGainSystem("R + B'PB is numerically singular")
    K = -np.linalg.solve(gain_system, B.T @ P @ A)
    radius = np.abs(np.linalg.eigvals(A + B @ K)).max()
    if radius >= 1.0:
        raise NoConvergence(f"LQR closed loop has spectral radius {radius:.6f} >= 1")
    return K
