"""
Pydantic models: the file and report contracts of the package.

Numerical results (condensed QPs, laws, regions, trajectories) are plain frozen
dataclasses next to the code that builds them; everything that crosses a file
boundary is validated here instead.
"""

import math
from enum import Enum, IntEnum
from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator

Matrix = List[List[float]]


class Mode(str, Enum):
    optimal = "optimal"
    suboptimal = "suboptimal"
    suboptimal_with_projections = "suboptimal-proj"

    @property
    def extends_regions(self) -> bool:
        return self is not Mode.optimal

    @property
    def uses_projections(self) -> bool:
        return self is Mode.suboptimal_with_projections


class Provenance(str, Enum):
    """Which construction produced a validity region."""

    optimal = "optimal"
    closed_form_F = "closed_form_F"
    projected_C = "projected_C"


class ConstraintKind(str, Enum):
    input = "input"
    state = "state"
    terminal = "terminal"


class PacketKind(IntEnum):
    optimal_polytope = 0
    extended = 1


# ── Problem file (what the user writes) ─────────────────────────────────────


class ProblemSpec(BaseModel):
    """Linear MPC problem definition as read from a problem file."""

    model_config = ConfigDict(populate_by_name=True, frozen=True)

    A: Matrix
    B: Matrix
    Q: Matrix
    R: Matrix
    N: int = Field(ge=1)
    lam: float = Field(default=1.0, alias="lambda", gt=0.0, le=1.0)
    x_bounds: List[Tuple[float, float]]
    u_bounds: List[Tuple[float, float]]

    @field_validator("A", "B", "Q", "R")
    @classmethod
    def _rectangular(cls, value: Matrix, info: ValidationInfo) -> Matrix:
        if not value or not value[0]:
            raise ValueError(f"{info.field_name}: needs at least one row and one column")
        width = len(value[0])
        for i, row in enumerate(value):
            if len(row) != width:
                raise ValueError(
                    f"{info.field_name}: row {i} has {len(row)} columns, expected {width}"
                )
            for j, entry in enumerate(row):
                if not math.isfinite(entry):
                    raise ValueError(
                        f"{info.field_name}: entry at row {i}, column {j} is not finite"
                    )
        return value

    @field_validator("x_bounds", "u_bounds")
    @classmethod
    def _origin_interior(
        cls, value: List[Tuple[float, float]], info: ValidationInfo
    ) -> List[Tuple[float, float]]:
        if not value:
            raise ValueError(f"{info.field_name}: at least one bound pair is required")
        for i, (lower, upper) in enumerate(value):
            if not lower < 0.0 < upper:
                raise ValueError(
                    f"{info.field_name}: pair {i} = ({lower}, {upper}) "
                    "must satisfy lower < 0 < upper"
                )
        return value

    @model_validator(mode="after")
    def _weights_positive_definite(self) -> "ProblemSpec":
        for name in ("Q", "R"):
            weight = np.asarray(getattr(self, name), dtype=float)
            if weight.shape[0] != weight.shape[1]:
                raise ValueError(f"{name}: must be square, got {weight.shape[0]}x{weight.shape[1]}")
            if not np.allclose(weight, weight.T, rtol=0.0, atol=1e-12 * (1 + np.abs(weight).max())):
                raise ValueError(f"{name}: must be symmetric")
            try:
                np.linalg.cholesky(weight)
            except np.linalg.LinAlgError as exc:
                raise ValueError(f"{name}: must be positive definite") from exc
        return self

    def matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Return (A, B, Q, R) as float arrays."""
        return tuple(np.asarray(getattr(self, name), dtype=float) for name in "ABQR")

    @property
    def x_lower(self) -> np.ndarray:
        return np.array([lower for lower, _ in self.x_bounds], dtype=float)

    @property
    def x_upper(self) -> np.ndarray:
        return np.array([upper for _, upper in self.x_bounds], dtype=float)

    @property
    def u_lower(self) -> np.ndarray:
        return np.array([lower for lower, _ in self.u_bounds], dtype=float)

    @property
    def u_upper(self) -> np.ndarray:
        return np.array([upper for _, upper in self.u_bounds], dtype=float)


# ── Persisted artifacts ──────────────────────────────────────────────────────


class RowTag(BaseModel):
    stage: int
    kind: ConstraintKind
    component: int


class SynthesisSummary(BaseModel):
    """Dimensions written next to qp.npz by the synth command."""

    n: int
    m: int
    N: int
    q: int
    variables: int
    terminal_rows: int
    rows: List[RowTag]


class RegionCacheEntry(BaseModel):
    active: List[int]
    n: int
    T: Matrix
    d: List[float]


class RegionCacheFile(BaseModel):
    version: int = 1
    entries: Dict[str, RegionCacheEntry] = Field(default_factory=dict)


# ── Experiment outputs ───────────────────────────────────────────────────────


class BatchReport(BaseModel):
    """Aggregates of one batch run in one mode."""

    problem: str
    mode: Mode
    lam: float
    count: int
    seed: int
    conv_tol: float
    max_steps: int
    qps: int
    flops: int
    costs: float
    bytes_tx: int
    messages: int
    steps: int
    failures: int

    @property
    def label(self) -> str:
        if self.mode is Mode.optimal:
            return self.mode.value
        return f"{self.mode.value}(lambda={self.lam:g})"


class ReportRow(BaseModel):
    mode: str
    qps: int
    flops: int
    costs: float
    d_qps_pct: float
    d_flops_pct: float
    d_costs_pct: float
