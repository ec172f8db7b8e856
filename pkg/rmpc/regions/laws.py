"""
Affine laws from active sets.

For an active set 𝒜 with G^𝒜 of full row rank, the equality-constrained QP gives

    Ū(x) = K̄x + b̄,   μ^𝒜(x) = −(G^𝒜H⁻¹G^𝒜')⁻¹(S^𝒜x + w^𝒜)

so the law is optimal wherever the inactive rows stay satisfied and μ^𝒜 >= 0
(the optimal polytope P*), and feasible wherever the inactive rows alone hold
(the closed-form feasibility polytope F).
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from config import settings
from errors import DegenerateActiveSet
from synthesis.condensing import CondensedQP
from synthesis.polytope import Polytope

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AffineLaw:
    K_bar: np.ndarray
    b_bar: np.ndarray
    K: np.ndarray
    b: np.ndarray
    active: tuple[int, ...]

    @property
    def key(self) -> str:
        """Cache key: the sorted active-set indices."""
        return ",".join(str(i) for i in sorted(self.active))

    def sequence(self, x: np.ndarray) -> np.ndarray:
        return self.K_bar @ x + self.b_bar

    def feedback(self, x: np.ndarray) -> np.ndarray:
        return self.K @ x + self.b


@dataclass(frozen=True)
class _ActiveSetAlgebra:
    """Matrices shared by the law and polytope formulas of one active set."""

    active: np.ndarray
    inactive: np.ndarray
    gain: np.ndarray  # H⁻¹G^𝒜'(G^𝒜H⁻¹G^𝒜')⁻¹, mN x |𝒜|
    M_inv: np.ndarray  # (G^𝒜H⁻¹G^𝒜')⁻¹


def _check_rank(qp: CondensedQP, active: np.ndarray) -> None:
    if active.size == 0:
        return
    G_A = qp.G[active]
    tol = settings.rank_tol * max(np.linalg.norm(G_A, 2), 1.0)
    rank = np.linalg.matrix_rank(G_A, tol=tol)
    if rank < active.size:
        raise DegenerateActiveSet(
            f"G^A has rank {rank} < {active.size} rows", tuple(active.tolist())
        )
    if active.size > qp.variables:
        raise DegenerateActiveSet("more active rows than variables", tuple(active.tolist()))


def _algebra(qp: CondensedQP, active: list[int]) -> _ActiveSetAlgebra:
    active = np.array(sorted(active), dtype=int)
    inactive = np.setdiff1d(np.arange(qp.q), active)
    _check_rank(qp, active)
    if active.size == 0:
        return _ActiveSetAlgebra(active, inactive, np.zeros((qp.variables, 0)), np.zeros((0, 0)))
    H_inv_Gt = qp.H_inv @ qp.G[active].T
    M_inv = np.linalg.inv(qp.G[active] @ H_inv_Gt)
    return _ActiveSetAlgebra(active, inactive, H_inv_Gt @ M_inv, M_inv)


def _checked_active(active: Sequence[int]) -> list[int]:
    active = [int(i) for i in active]
    if len(set(active)) != len(active):
        raise DegenerateActiveSet("duplicate rows in active set", tuple(active))
    return active


def law_and_polytope(qp: CondensedQP, active: Sequence[int]) -> tuple[AffineLaw, Polytope]:
    """
    Affine law and optimal polytope P* for the given active set.

    P* stacks the inactive-row conditions (|ℐ| rows) over the multiplier sign
    conditions (|𝒜| rows). Raises DegenerateActiveSet if G^𝒜 is rank deficient.
    """
    alg = _algebra(qp, _checked_active(active))
    m = qp.m
    H_inv_Ft = qp.H_inv @ qp.F.T
    S_A, w_A = qp.S[alg.active], qp.w[alg.active]
    K_bar = alg.gain @ S_A - H_inv_Ft
    b_bar = alg.gain @ w_A
    law = AffineLaw(K_bar, b_bar, K_bar[:m].copy(), b_bar[:m].copy(), tuple(alg.active.tolist()))

    G_I = qp.G[alg.inactive]
    T_star = np.vstack([G_I @ alg.gain @ S_A - qp.S[alg.inactive], alg.M_inv @ S_A])
    d_star = -np.concatenate([G_I @ alg.gain @ w_A - qp.w[alg.inactive], alg.M_inv @ w_A])
    return law, Polytope(T_star, d_star)


def feasibility_polytope_F(qp: CondensedQP, active: Sequence[int]) -> Polytope:
    """Closed-form region where the whole law sequence K̄x + b̄ satisfies every constraint."""
    alg = _algebra(qp, _checked_active(active))
    S_A, w_A = qp.S[alg.active], qp.w[alg.active]
    G_I = qp.G[alg.inactive]
    T1 = G_I @ alg.gain @ S_A - qp.S[alg.inactive]
    d1 = -(G_I @ alg.gain @ w_A) + qp.w[alg.inactive]
    return Polytope(T1, d1)


def independent_subset(
    qp: CondensedQP, active: Sequence[int], tol: Optional[float] = None
) -> tuple[int, ...]:
    """Maximal linearly independent subset of the active rows, scanning lowest indices first."""
    tol = settings.rank_tol if tol is None else tol
    rows = sorted(set(int(i) for i in active))
    if not rows:
        return ()
    scale = max(np.linalg.norm(qp.G[rows], 2), 1.0)
    kept: list[int] = []
    for i in rows:
        candidate = qp.G[kept + [i]]
        if np.linalg.matrix_rank(candidate, tol=tol * scale) == len(kept) + 1:
            kept.append(i)
    return tuple(kept)


def law_for_active_set(qp: CondensedQP, active: Sequence[int]) -> tuple[AffineLaw, Polytope]:
    """law_and_polytope with deterministic repair of rank-deficient active sets."""
    try:
        return law_and_polytope(qp, active)
    except DegenerateActiveSet:
        repaired = independent_subset(qp, active)
        logger.warning(
            "Degenerate active set of size %d repaired to %d independent rows",
            len(active),
            len(repaired),
        )
        return law_and_polytope(qp, repaired)


def is_saturated(law: AffineLaw, u_lower: np.ndarray, u_upper: np.ndarray) -> bool:
    """True if every component of u(0) is pinned by the law to an input bound."""
    if np.any(np.abs(law.K) > 1e-12):
        return False
    at_bound = np.minimum(np.abs(law.b - u_lower), np.abs(law.b - u_upper)) <= 1e-9
    return bool(np.all(at_bound))
