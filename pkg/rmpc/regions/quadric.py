"""
Stability quadric of an affine law.

Along the law, the QP objective is V(x) = x'M1x + M2x + M5. If A + BK is
invertible, the predecessor of x under the law is x⁻ = M3x + M4, and the
cost-decrease condition V(x) < λ·V(x⁻) becomes the single quadratic inequality

    x'T3x + T2x < d2.

T2, T3 and d2 are expanded directly from that condition.
"""

from dataclasses import dataclass

import numpy as np
from config import settings
from errors import SingularClosedLoop
from regions.laws import AffineLaw
from synthesis.condensing import CondensedQP


@dataclass(frozen=True)
class QuadricInequality:
    """{x | x'T3x + T2x < d2}, the part of the quadric a local node needs."""

    T3: np.ndarray
    T2: np.ndarray
    d2: float

    def value(self, x: np.ndarray) -> float:
        return float(x @ self.T3 @ x + self.T2 @ x)

    def contains(self, x: np.ndarray) -> bool:
        return self.value(x) < self.d2


@dataclass(frozen=True)
class StabilityQuadric:
    inequality: QuadricInequality
    lam: float
    M1: np.ndarray
    M2: np.ndarray
    M3: np.ndarray
    M4: np.ndarray
    M5: float

    @property
    def T3(self) -> np.ndarray:
        return self.inequality.T3

    @property
    def T2(self) -> np.ndarray:
        return self.inequality.T2

    @property
    def d2(self) -> float:
        return self.inequality.d2

    def cost(self, x: np.ndarray) -> float:
        """V(x) along the law."""
        return float(x @ self.M1 @ x + self.M2 @ x + self.M5)

    def predecessor(self, x: np.ndarray) -> np.ndarray:
        return self.M3 @ x + self.M4


def law_cost_terms(qp: CondensedQP, law: AffineLaw) -> tuple[np.ndarray, np.ndarray, float]:
    """(M1, M2, M5) with V(x) = x'M1x + M2x + M5 equal to the QP objective at (x, K̄x + b̄)."""
    K_bar, b_bar = law.K_bar, law.b_bar
    M1 = 0.5 * K_bar.T @ qp.H @ K_bar + qp.F @ K_bar + 0.5 * qp.Y
    M1 = 0.5 * (M1 + M1.T)
    M2 = b_bar @ qp.H @ K_bar + b_bar @ qp.F.T
    M5 = float(0.5 * b_bar @ qp.H @ b_bar)
    return M1, M2, M5


def stability_quadric(
    qp: CondensedQP, law: AffineLaw, A: np.ndarray, B: np.ndarray, lam: float
) -> StabilityQuadric:
    """
    Build the quadric for cost-decrease factor lam ∈ (0, 1].

    Raises SingularClosedLoop if A + BK is numerically singular; the caller then
    falls back to the optimal polytope.
    """
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"lambda must lie in (0, 1], got {lam}")
    closed_loop = A + B @ law.K
    singular_values = np.linalg.svd(closed_loop, compute_uv=False)
    if singular_values[-1] <= settings.singular_tol * singular_values[0]:
        raise SingularClosedLoop(
            f"A + BK has smallest singular value {singular_values[-1]:.3e}"
        )
    M3 = np.linalg.inv(closed_loop)
    M4 = -M3 @ B @ law.b
    M1, M2, M5 = law_cost_terms(qp, law)

    T3 = M1 - lam * M3.T @ M1 @ M3
    T3 = 0.5 * (T3 + T3.T)
    T2 = M2 - lam * (2.0 * M4 @ M1 @ M3 + M2 @ M3)
    d2 = float(lam * (M4 @ M1 @ M4 + M2 @ M4 + M5) - M5)
    return StabilityQuadric(QuadricInequality(T3, T2, d2), lam, M1, M2, M3, M4, M5)
