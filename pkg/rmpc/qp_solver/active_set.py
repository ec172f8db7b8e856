"""
Dual active-set solver (Goldfarb–Idnani) for the condensed QP.

Starts from the unconstrained minimizer −H⁻¹F'x, which is dual feasible, and
repeatedly adds the most violated constraint (lowest row index on ties). Adding
a constraint may first require dropping blocking constraints whose multipliers
would turn negative. No phase 1 is needed and the working set it ends with is
linearly independent.

A solver instance keeps its own workspace; create one per trajectory and share
the CondensedQP between them.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from config import settings
from errors import InfeasibleQP, MaxIterations
from synthesis.condensing import CondensedQP

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QPSolution:
    U_bar: np.ndarray
    value: float
    active: tuple[int, ...]
    inactive: tuple[int, ...]
    multipliers: np.ndarray
    iterations: int


def _row_scale(qp: CondensedQP, x: np.ndarray) -> np.ndarray:
    return 1.0 + np.abs(qp.w) + np.linalg.norm(qp.E, axis=1) * np.linalg.norm(x)


def active_set(
    qp: CondensedQP, x: np.ndarray, U_bar: np.ndarray, eps_act: Optional[float] = None
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split the constraint indices into (active, inactive) by the scaled residual rule."""
    eps_act = settings.eps_act if eps_act is None else eps_act
    tight = np.abs(qp.slack(x, U_bar)) <= eps_act * _row_scale(qp, x)
    return tuple(np.flatnonzero(tight).tolist()), tuple(np.flatnonzero(~tight).tolist())


class DualActiveSetSolver:
    def __init__(self, qp: CondensedQP, max_iter: Optional[int] = None):
        self.qp = qp
        self.max_iter = max_iter or 10 * (qp.q + qp.variables) + 100
        self._H_inv = qp.H_inv
        self._H_inv_Gt = self._H_inv @ qp.G.T

    def _directions(self, working: list[int], p: int) -> tuple[np.ndarray, np.ndarray]:
        """Primal step z and dual step r for bringing constraint p into the working set."""
        step = self._H_inv_Gt[:, p]
        if not working:
            return -step, np.zeros(0)
        N_H = self._H_inv_Gt[:, working]
        M = self.qp.G[working] @ N_H
        r = np.linalg.solve(M, self.qp.G[working] @ step)
        return -(step - N_H @ r), r

    def solve(self, x: np.ndarray) -> QPSolution:
        qp = self.qp
        x = np.asarray(x, dtype=float)
        h = qp.w + qp.E @ x
        threshold = settings.qp_feas_tol * _row_scale(qp, x)

        U = -self._H_inv @ (qp.F.T @ x)
        working: list[int] = []
        mu_working = np.zeros(0)

        for iteration in range(1, self.max_iter + 1):
            violation = qp.G @ U - h
            violation[working] = 0.0
            violated = violation > threshold
            if not np.any(violated):
                return self._finish(x, U, working, mu_working, iteration)
            p = int(np.argmax(np.where(violated, violation, -np.inf)))
            mu_p = 0.0

            while True:
                z, r = self._directions(working, p)
                curvature = -(qp.G[p] @ z)
                if curvature > 1e-12 * (1.0 + qp.G[p] @ self._H_inv_Gt[:, p]):
                    t_primal = (qp.G[p] @ U - h[p]) / curvature
                else:
                    t_primal = np.inf

                blocking = np.flatnonzero(r > 1e-12)
                if blocking.size:
                    ratios = mu_working[blocking] / r[blocking]
                    t_dual = ratios.min()
                    drop = int(blocking[np.argmin(ratios)])
                else:
                    t_dual = np.inf

                if np.isinf(t_primal) and np.isinf(t_dual):
                    raise InfeasibleQP(f"no feasible input sequence for x = {x}")

                if t_primal <= t_dual:
                    U = U + t_primal * z
                    mu_working = np.append(mu_working - t_primal * r, mu_p + t_primal)
                    working.append(p)
                    break

                if np.isfinite(t_primal):
                    U = U + t_dual * z
                mu_working = mu_working - t_dual * r
                mu_p += t_dual
                mu_working = np.delete(mu_working, drop)
                del working[drop]

        raise MaxIterations(f"dual active-set solver exceeded {self.max_iter} iterations")

    def _finish(
        self,
        x: np.ndarray,
        U: np.ndarray,
        working: list[int],
        mu_working: np.ndarray,
        iterations: int,
    ) -> QPSolution:
        multipliers = np.zeros(self.qp.q)
        multipliers[working] = mu_working
        active, inactive = active_set(self.qp, x, U)
        logger.debug("QP solved in %d iterations, |A|=%d", iterations, len(active))
        return QPSolution(
            U_bar=U,
            value=self.qp.objective(x, U),
            active=active,
            inactive=inactive,
            multipliers=multipliers,
            iterations=iterations,
        )


def solve_qp(qp: CondensedQP, x: np.ndarray) -> QPSolution:
    """One-shot solve; raises InfeasibleQP when x is outside X_f."""
    return DualActiveSetSolver(qp).solve(x)


def is_feasible(qp: CondensedQP, x: np.ndarray) -> bool:
    try:
        solve_qp(qp, x)
    except InfeasibleQP:
        return False
    return True
