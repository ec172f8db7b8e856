"""
H-representation polytope {x | T x <= d}.

Only the cheap, LP-free operations live here. Redundancy removal and containment
need the simplex engine and are in qp_solver/simplex.py.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Polytope:
    T: np.ndarray
    d: np.ndarray

    def __post_init__(self) -> None:
        T = np.atleast_2d(np.asarray(self.T, dtype=float))
        d = np.asarray(self.d, dtype=float).reshape(-1)
        if T.shape[0] != d.shape[0]:
            raise ValueError(f"T has {T.shape[0]} rows but d has {d.shape[0]} entries")
        if not (np.all(np.isfinite(T)) and np.all(np.isfinite(d))):
            raise ValueError("polytope data must be finite")
        zero_rows = ~np.any(T != 0.0, axis=1)
        if np.any(zero_rows & (d < -1e-12)):
            raise ValueError("representation contains 0·x <= d with d < 0 (certifiably empty)")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_box(cls, lower: np.ndarray, upper: np.ndarray) -> "Polytope":
        """Box lower <= x <= upper, upper rows first."""
        n = len(lower)
        eye = np.eye(n)
        return cls(np.vstack([eye, -eye]), np.concatenate([upper, -np.asarray(lower)]))

    @classmethod
    def empty_rows(cls, n: int) -> "Polytope":
        return cls(np.zeros((0, n)), np.zeros(0))

    @property
    def rows(self) -> int:
        return self.T.shape[0]

    @property
    def dim(self) -> int:
        return self.T.shape[1]

    def residual(self, x: np.ndarray) -> np.ndarray:
        return self.T @ x - self.d

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        if self.rows == 0:
            return True
        return bool(np.all(self.T @ x <= self.d + tol))

    def intersect(self, other: "Polytope") -> "Polytope":
        return Polytope(np.vstack([self.T, other.T]), np.concatenate([self.d, other.d]))

    def subset_rows(self, keep: np.ndarray) -> "Polytope":
        return Polytope(self.T[keep], self.d[keep])
