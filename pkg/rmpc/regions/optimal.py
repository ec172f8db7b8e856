"""Optimal polytope P*: the law is the exact QP solution inside it."""

from dataclasses import dataclass

import numpy as np
from models import Provenance
from regions.base import POLYTOPE_TOL, ValidityRegion
from synthesis.polytope import Polytope


@dataclass(frozen=True)
class OptimalPolytope(ValidityRegion):
    poly: Polytope
    provenance: Provenance = Provenance.optimal

    @property
    def n(self) -> int:
        return self.poly.dim

    @property
    def flops(self) -> int:
        return 2 * self.poly.rows * self.n

    def contains(self, x: np.ndarray) -> bool:
        return self.poly.contains(x, POLYTOPE_TOL)
