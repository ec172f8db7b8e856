"""
Condensing: turn a ProblemSpec into the parametric QP

    min_U  ½ U'HU + x'FU + ½ x'Yx     s.t.  G U <= w + E x

with the dynamics substituted out. H, F and Y are scaled so that the objective
equals the MPC cost x(N)'Px(N) + Σ x(k)'Qx(k) + u(k)'Ru(k) exactly.

Constraint rows are stacked per stage k = 0..N−1 as: input bounds on u(k),
then state bounds on x(k+1) for k <= N−2; the terminal-set rows on x(N) come
last. Bounds on x(0) are not encoded because x(0) is the parameter.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from errors import DimensionMismatch
from models import ConstraintKind, ProblemSpec, RowTag
from scipy.linalg import block_diag, cho_factor, cho_solve
from synthesis.polytope import Polytope
from synthesis.riccati import lqr_gain, solve_dare
from synthesis.terminal_set import terminal_set

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Plant:
    """Sampled plant x⁺ = A x + B u together with its constraint box."""

    A: np.ndarray
    B: np.ndarray
    x_lower: np.ndarray
    x_upper: np.ndarray
    u_lower: np.ndarray
    u_upper: np.ndarray

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    def step(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        return self.A @ x + self.B @ u


@dataclass(frozen=True)
class CondensedQP:
    H: np.ndarray
    F: np.ndarray
    Y: np.ndarray
    G: np.ndarray
    w: np.ndarray
    E: np.ndarray
    S: np.ndarray
    P: np.ndarray
    K_lqr: np.ndarray
    terminal_set: Polytope
    row_tags: tuple[RowTag, ...]
    plant: Plant
    horizon: int

    @property
    def n(self) -> int:
        return self.F.shape[0]

    @property
    def m(self) -> int:
        return self.plant.m

    @property
    def q(self) -> int:
        return self.G.shape[0]

    @property
    def variables(self) -> int:
        return self.H.shape[0]

    @cached_property
    def H_inv(self) -> np.ndarray:
        factor = cho_factor(self.H)
        return cho_solve(factor, np.eye(self.variables))

    def objective(self, x: np.ndarray, U: np.ndarray) -> float:
        return float(0.5 * U @ self.H @ U + x @ self.F @ U + 0.5 * x @ self.Y @ x)

    def slack(self, x: np.ndarray, U: np.ndarray) -> np.ndarray:
        """G U − w − E x; non-positive entries are satisfied constraints."""
        return self.G @ U - self.w - self.E @ x


def prediction_matrices(A: np.ndarray, B: np.ndarray, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (Phi, Gamma) with (x(1); …; x(N)) = Phi x(0) + Gamma U."""
    n, m = B.shape
    Phi = np.zeros((n * N, n))
    Gamma = np.zeros((n * N, m * N))
    power = np.eye(n)
    for k in range(N):
        power = A @ power
        Phi[k * n : (k + 1) * n] = power
    for k in range(N):
        block = B
        for j in range(k, -1, -1):
            Gamma[k * n : (k + 1) * n, j * m : (j + 1) * m] = block
            block = A @ block
    return Phi, Gamma


def _check_dimensions(spec: ProblemSpec, A, B, Q, R) -> None:
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionMismatch(f"A must be square, got {A.shape}")
    if B.shape[0] != n:
        raise DimensionMismatch(f"B has {B.shape[0]} rows, A has {n}")
    m = B.shape[1]
    if Q.shape != (n, n):
        raise DimensionMismatch(f"Q must be {n}x{n}, got {Q.shape}")
    if R.shape != (m, m):
        raise DimensionMismatch(f"R must be {m}x{m}, got {R.shape}")
    if len(spec.x_bounds) != n:
        raise DimensionMismatch(f"x_bounds has {len(spec.x_bounds)} pairs, expected {n}")
    if len(spec.u_bounds) != m:
        raise DimensionMismatch(f"u_bounds has {len(spec.u_bounds)} pairs, expected {m}")


def plant_of(spec: ProblemSpec) -> Plant:
    A, B, _, _ = spec.matrices()
    return Plant(A, B, spec.x_lower, spec.x_upper, spec.u_lower, spec.u_upper)


def condense(spec: ProblemSpec) -> CondensedQP:
    """Build the condensed QP, including Riccati weight, LQR gain and terminal set."""
    A, B, Q, R = spec.matrices()
    _check_dimensions(spec, A, B, Q, R)
    n, m, N = A.shape[0], B.shape[1], spec.N
    plant = plant_of(spec)

    P = solve_dare(A, B, Q, R)
    K_lqr = lqr_gain(A, B, R, P)
    X = Polytope.from_box(plant.x_lower, plant.x_upper)
    U = Polytope.from_box(plant.u_lower, plant.u_upper)
    terminal = terminal_set(A + B @ K_lqr, X, U, K_lqr)

    Phi, Gamma = prediction_matrices(A, B, N)
    Q_bar = block_diag(*([Q] * (N - 1) + [P]))
    R_bar = np.kron(np.eye(N), R)
    H = 2.0 * (Gamma.T @ Q_bar @ Gamma + R_bar)
    F = 2.0 * Phi.T @ Q_bar @ Gamma
    Y = 2.0 * (Q + Phi.T @ Q_bar @ Phi)
    H = 0.5 * (H + H.T)
    Y = 0.5 * (Y + Y.T)

    G_rows, w_rows, E_rows, tags = [], [], [], []
    input_select = np.vstack([np.eye(m), -np.eye(m)])
    state_select = np.vstack([np.eye(n), -np.eye(n)])
    for k in range(N):
        G_u = np.zeros((2 * m, m * N))
        G_u[:, k * m : (k + 1) * m] = input_select
        G_rows.append(G_u)
        w_rows.append(np.concatenate([plant.u_upper, -plant.u_lower]))
        E_rows.append(np.zeros((2 * m, n)))
        tags += [RowTag(stage=k, kind=ConstraintKind.input, component=i % m) for i in range(2 * m)]

        if k <= N - 2:
            block = slice(k * n, (k + 1) * n)
            G_rows.append(state_select @ Gamma[block])
            w_rows.append(np.concatenate([plant.x_upper, -plant.x_lower]))
            E_rows.append(-state_select @ Phi[block])
            tags += [
                RowTag(stage=k + 1, kind=ConstraintKind.state, component=i % n)
                for i in range(2 * n)
            ]

    last = slice((N - 1) * n, N * n)
    G_rows.append(terminal.T @ Gamma[last])
    w_rows.append(terminal.d)
    E_rows.append(-terminal.T @ Phi[last])
    tags += [
        RowTag(stage=N, kind=ConstraintKind.terminal, component=i) for i in range(terminal.rows)
    ]

    G = np.vstack(G_rows)
    w = np.concatenate(w_rows)
    E = np.vstack(E_rows)
    H_inv = cho_solve(cho_factor(H), np.eye(m * N))
    S = E + G @ H_inv @ F.T

    qp = CondensedQP(
        H=H,
        F=F,
        Y=Y,
        G=G,
        w=w,
        E=E,
        S=S,
        P=P,
        K_lqr=K_lqr,
        terminal_set=terminal,
        row_tags=tuple(tags),
        plant=plant,
        horizon=N,
    )
    logger.info(
        "Condensed QP: q=%d variables=%d terminal_rows=%d", qp.q, qp.variables, terminal.rows
    )
    return qp
