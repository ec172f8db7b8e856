"""
Extended region E = B ∩ V.

B is a feasibility polytope (closed-form F or projected C), V the stability
quadric. E may be non-convex; its boundary is never computed, membership is
just the two inequality checks.
"""

from dataclasses import dataclass

import numpy as np
from models import Provenance
from regions.base import POLYTOPE_TOL, ValidityRegion
from regions.quadric import QuadricInequality
from synthesis.polytope import Polytope


@dataclass(frozen=True)
class ExtendedRegion(ValidityRegion):
    feas: Polytope
    stab: QuadricInequality
    provenance: Provenance = Provenance.closed_form_F

    @property
    def n(self) -> int:
        return self.feas.dim

    @property
    def flops(self) -> int:
        n = self.n
        return 2 * n * n + 3 * n + 2 * self.feas.rows * n

    def contains(self, x: np.ndarray) -> bool:
        return self.feas.contains(x, POLYTOPE_TOL) and self.stab.contains(x)
