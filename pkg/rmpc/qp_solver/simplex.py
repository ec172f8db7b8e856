"""
Dense two-phase simplex with Bland's rule, and the polytope operations built on it.

lp_max(poly, c) maximizes c'x over {x | T x <= d} with x free. The problem is put
in standard form with x = x⁺ − x⁻ and one slack per row; rows with negative
right-hand side get an artificial variable and a phase-1 pass. Bland's rule
(lowest entering index, lowest leaving basic index on ratio ties) makes every
run deterministic and cycle-free.

Everything that needs an exact redundancy or containment certificate
(terminal set, Fourier–Motzkin clean-up, region containment) goes through here.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from config import settings
from errors import LPEmpty, LPUnbounded, MaxIterations
from synthesis.polytope import Polytope

logger = logging.getLogger(__name__)

_OPTIMAL = "optimal"
_UNBOUNDED = "unbounded"

# Rows whose coefficient norm is below this are treated as 0·x <= d.
_ZERO_ROW = 1e-12


@dataclass(frozen=True)
class LPResult:
    value: float
    argmax: np.ndarray


def _pivot(tab: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    factors = tab[:, col].copy()
    factors[row] = 0.0
    tab -= np.outer(factors, tab[row])


def _iterate(tab: np.ndarray, basis: np.ndarray, n_cols: int, tol: float, max_iter: int) -> str:
    """Run Bland-rule pivots on the objective row until optimal or unbounded."""
    m = basis.shape[0]
    for _ in range(max_iter):
        entering = np.flatnonzero(tab[-1, :n_cols] < -tol)
        if entering.size == 0:
            return _OPTIMAL
        col = int(entering[0])
        column = tab[:m, col]
        eligible = np.flatnonzero(column > tol)
        if eligible.size == 0:
            return _UNBOUNDED
        ratios = tab[eligible, -1] / column[eligible]
        best = ratios.min()
        tied = eligible[ratios <= best + tol * (1.0 + abs(best))]
        row = int(tied[np.argmin(basis[tied])])
        _pivot(tab, row, col)
        basis[row] = col
    raise MaxIterations(f"simplex exceeded {max_iter} pivots")


def _drop_artificials(
    tab: np.ndarray, basis: np.ndarray, n_struct: int, tol: float
) -> tuple[np.ndarray, np.ndarray]:
    """Pivot zero-level artificials out of the basis, dropping rows that are linearly dependent."""
    keep_rows = np.ones(basis.shape[0], dtype=bool)
    for i in range(basis.shape[0]):
        if basis[i] < n_struct:
            continue
        candidates = np.flatnonzero(np.abs(tab[i, :n_struct]) > tol)
        if candidates.size == 0:
            keep_rows[i] = False
            continue
        col = int(candidates[0])
        _pivot(tab, i, col)
        basis[i] = col
    rows = np.concatenate([np.flatnonzero(keep_rows), [tab.shape[0] - 1]])
    cols = np.concatenate([np.arange(n_struct), [tab.shape[1] - 1]])
    return tab[np.ix_(rows, cols)], basis[keep_rows]


def _normalized(polytope: Polytope) -> tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(polytope.T, axis=1)
    keep = norms > _ZERO_ROW
    return polytope.T[keep] / norms[keep, None], polytope.d[keep] / norms[keep]


def lp_max(
    polytope: Polytope,
    c: np.ndarray,
    *,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> LPResult:
    """
    Maximize c'x subject to T x <= d.

    Raises LPEmpty if the polytope is empty and LPUnbounded if the objective is
    unbounded above on it.
    """
    tol = settings.lp_tol if tol is None else tol
    c = np.asarray(c, dtype=float).reshape(-1)
    T, d = _normalized(polytope)
    r, n = T.shape[0], polytope.dim

    if r == 0:
        if np.any(c != 0.0):
            raise LPUnbounded("objective is unbounded over the whole space")
        return LPResult(0.0, np.zeros(n))

    c_scale = max(np.abs(c).max(), 1.0)
    n_struct = 2 * n + r
    flipped = np.flatnonzero(d < 0.0)
    k = flipped.shape[0]
    max_iter = max_iter or 50 * (r + n_struct + k) + 100

    tab = np.zeros((r + 1, n_struct + k + 1))
    tab[:r, :n] = T
    tab[:r, n : 2 * n] = -T
    tab[:r, 2 * n : n_struct] = np.eye(r)
    tab[:r, -1] = d
    tab[flipped, :n_struct] *= -1.0
    tab[flipped, -1] *= -1.0
    tab[flipped, n_struct + np.arange(k)] = 1.0

    basis = 2 * n + np.arange(r)
    basis[flipped] = n_struct + np.arange(k)

    if k:
        tab[-1, n_struct : n_struct + k] = 1.0
        tab[-1] -= tab[flipped].sum(axis=0)
        _iterate(tab, basis, n_struct + k, tol, max_iter)
        infeasibility = -tab[-1, -1]
        if infeasibility > tol * (1.0 + np.abs(d).max()) * r:
            raise LPEmpty(f"polytope is empty (phase-1 residual {infeasibility:.3e})")
        tab, basis = _drop_artificials(tab, basis, n_struct, tol)

    cost = np.concatenate([-c / c_scale, c / c_scale, np.zeros(r)])
    tab[-1] = 0.0
    tab[-1, :n_struct] = cost
    for i, j in enumerate(basis):
        if cost[j] != 0.0:
            tab[-1] -= cost[j] * tab[i]

    if _iterate(tab, basis, n_struct, tol, max_iter) == _UNBOUNDED:
        raise LPUnbounded("objective is unbounded over the polytope")

    z = np.zeros(n_struct)
    z[basis] = tab[:-1, -1]
    x = z[:n] - z[n : 2 * n]
    return LPResult(float(c @ x), x)


# ── Polytope operations on top of lp_max ─────────────────────────────────────


def clean_rows(T: np.ndarray, d: np.ndarray, tol: Optional[float] = None) -> Polytope:
    """
    Normalize rows to unit norm, drop 0·x <= d rows and exact duplicates.

    Duplicates keep the tightest right-hand side; surviving rows keep their
    original order. Raises LPEmpty on a 0·x <= d row with d < −tol.
    """
    tol = settings.redundancy_tol if tol is None else tol
    T = np.atleast_2d(np.asarray(T, dtype=float))
    d = np.asarray(d, dtype=float).reshape(-1)
    norms = np.linalg.norm(T, axis=1)
    zero = norms <= _ZERO_ROW
    if np.any(d[zero] < -tol):
        raise LPEmpty("row 0·x <= d with negative d")
    T, d, norms = T[~zero], d[~zero], norms[~zero]
    if T.shape[0] == 0:
        return Polytope.empty_rows(T.shape[1])
    T = T / norms[:, None]
    d = d / norms
    _, first, groups = np.unique(np.round(T, 12), axis=0, return_index=True, return_inverse=True)
    groups = groups.reshape(-1)
    tightest = np.full(first.shape[0], np.inf)
    np.minimum.at(tightest, groups, d)
    order = np.argsort(first)
    return Polytope(T[first[order]], tightest[order])


def is_redundant(
    polytope: Polytope, row: np.ndarray, rhs: float, tol: Optional[float] = None
) -> bool:
    """True if row·x <= rhs holds on the whole polytope (LP certificate)."""
    tol = settings.redundancy_tol if tol is None else tol
    if np.linalg.norm(row) <= _ZERO_ROW:
        return rhs >= -tol
    try:
        return lp_max(polytope, row).value <= rhs + tol
    except LPUnbounded:
        return False


def remove_redundant(polytope: Polytope, tol: Optional[float] = None) -> Polytope:
    """
    Return a minimal representation of the polytope.

    Each row is tested against the rows kept so far plus a relaxed copy of
    itself (which keeps the LP bounded wherever the row itself bounds it).
    """
    tol = settings.redundancy_tol if tol is None else tol
    poly = clean_rows(polytope.T, polytope.d, tol)
    keep = np.ones(poly.rows, dtype=bool)
    for i in range(poly.rows):
        keep[i] = False
        own_row = Polytope(poly.T[i : i + 1], poly.d[i : i + 1] + 1.0)
        relaxed = poly.subset_rows(keep).intersect(own_row)
        keep[i] = not is_redundant(relaxed, poly.T[i], poly.d[i], tol)
    reduced = poly.subset_rows(keep)
    logger.debug("Redundancy removal: %d -> %d rows", polytope.rows, reduced.rows)
    return reduced


def max_violation(inner: Polytope, outer: Polytope) -> float:
    """
    Largest amount by which a point of `inner` violates a row of `outer`.

    Rows are measured in the scale of `outer` as given; +inf if `inner` is
    unbounded along some row direction.
    """
    worst = -np.inf
    for row, rhs in zip(outer.T, outer.d):
        try:
            worst = max(worst, lp_max(inner, row).value - rhs)
        except LPUnbounded:
            return np.inf
    return worst


def is_subset(inner: Polytope, outer: Polytope, tol: Optional[float] = None) -> bool:
    tol = settings.redundancy_tol if tol is None else tol
    if outer.rows == 0:
        return True
    return max_violation(inner, outer) <= tol


def chebyshev_center(polytope: Polytope, radius_cap: float = 1e3) -> tuple[np.ndarray, float]:
    """Center and radius of the largest ball inside the polytope."""
    norms = np.linalg.norm(polytope.T, axis=1)
    n = polytope.dim
    lifted = Polytope(
        np.vstack([np.hstack([polytope.T, norms[:, None]]), np.eye(n + 1)[-1:]]),
        np.concatenate([polytope.d, [radius_cap]]),
    )
    direction = np.zeros(n + 1)
    direction[-1] = 1.0
    result = lp_max(lifted, direction)
    return result.argmax[:n], float(result.argmax[-1])
