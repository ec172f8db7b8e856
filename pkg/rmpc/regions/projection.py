"""
Projection feasibility region C.

Fix u(0) = Kx + b in the QP constraints, which leaves a polytope in (x, u(1..N−1)),
then project the tail inputs away by Fourier–Motzkin elimination. Redundant rows
are removed after every eliminated variable to keep the intermediate systems small.
"""

import logging
from typing import Optional, Sequence

import numpy as np
from config import settings
from errors import ProjectionTooLarge
from qp_solver.simplex import clean_rows, remove_redundant
from regions.laws import AffineLaw
from synthesis.condensing import CondensedQP
from synthesis.polytope import Polytope

logger = logging.getLogger(__name__)

_ZERO_COEFF = 1e-12


def _next_column(T: np.ndarray, columns: list[int]) -> int:
    """Column with the fewest generated rows (|pos|·|neg|), lowest position on ties."""
    costs = [
        int(np.sum(T[:, j] > _ZERO_COEFF)) * int(np.sum(T[:, j] < -_ZERO_COEFF)) for j in columns
    ]
    return columns[int(np.argmin(costs))]


def fourier_motzkin(
    polytope: Polytope, eliminate: Sequence[int], row_limit: Optional[int] = None
) -> Polytope:
    """Project the polytope onto the coordinates not listed in `eliminate`."""
    row_limit = settings.projection_row_limit if row_limit is None else row_limit
    current = remove_redundant(polytope)
    T, d = current.T, current.d
    # column positions of the remaining variables to eliminate; shift left as columns go
    pending = sorted(set(int(j) for j in eliminate))
    remaining = polytope.dim - len(pending)

    while pending:
        j = _next_column(T, pending)
        coeff = T[:, j]
        pos = np.flatnonzero(coeff > _ZERO_COEFF)
        neg = np.flatnonzero(coeff < -_ZERO_COEFF)
        zero = np.flatnonzero(np.abs(coeff) <= _ZERO_COEFF)

        a_pos = coeff[pos]
        a_neg = -coeff[neg]
        # every (pos, neg) pair: a_neg·row_pos + a_pos·row_neg cancels column j
        pos_part = T[pos][:, None, :] * a_neg[None, :, None]
        neg_part = T[neg][None, :, :] * a_pos[:, None, None]
        combined_T = (pos_part + neg_part).reshape(-1, T.shape[1])
        combined_d = (d[pos][:, None] * a_neg[None, :] + d[neg][None, :] * a_pos[:, None]).ravel()

        rows = zero.size + combined_T.shape[0]
        if rows > row_limit:
            raise ProjectionTooLarge(f"elimination produced {rows} rows (limit {row_limit})")

        T_next = np.delete(np.vstack([T[zero], combined_T]), j, axis=1)
        d_next = np.concatenate([d[zero], combined_d])
        reduced = remove_redundant(clean_rows(T_next, d_next))
        logger.debug(
            "FM step: %d pos x %d neg + %d zero -> %d rows (%d after clean-up)",
            pos.size,
            neg.size,
            zero.size,
            rows,
            reduced.rows,
        )
        T, d = reduced.T, reduced.d
        pending = [p if p < j else p - 1 for p in pending if p != j]

    assert T.shape[1] == remaining
    return Polytope(T, d)


def projection_region_C(
    qp: CondensedQP,
    law: AffineLaw,
    elim_cap: Optional[int] = None,
    *,
    override: bool = False,
    row_limit: Optional[int] = None,
) -> Polytope:
    """
    Region of x for which u(0) = Kx + b admits a feasible tail u(1..N−1).

    Raises ProjectionTooLarge if more than `elim_cap` variables would have to be
    eliminated (unless `override`) or the intermediate row count exceeds `row_limit`.
    """
    elim_cap = settings.projection_elim_cap if elim_cap is None else elim_cap
    m, n = qp.m, qp.n
    n_elim = qp.variables - m
    if n_elim > elim_cap and not override:
        raise ProjectionTooLarge(f"{n_elim} variables to eliminate exceeds cap {elim_cap}")

    G_first, G_tail = qp.G[:, :m], qp.G[:, m:]
    augmented = clean_rows(np.hstack([G_first @ law.K - qp.E, G_tail]), qp.w - G_first @ law.b)
    region = fourier_motzkin(augmented, range(n, n + n_elim), row_limit)
    logger.info("Projected region for law [%s]: %d rows", law.key, region.rows)
    return region
