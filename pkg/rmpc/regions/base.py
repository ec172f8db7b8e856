"""
Abstract base class for validity regions.

The controller and the local node only ever ask a region two things: does it
contain x, and what does that check cost in flops. Each region kind lives in
its own module and implements both.
"""

from abc import ABC, abstractmethod

import numpy as np
from models import Provenance

# Slack allowed on linear rows; the quadric inequality is strict with no slack.
POLYTOPE_TOL = 1e-9


class ValidityRegion(ABC):
    provenance: Provenance

    @property
    @abstractmethod
    def n(self) -> int:
        """State dimension."""

    @property
    @abstractmethod
    def flops(self) -> int:
        """Floating point operations of one membership check."""

    @abstractmethod
    def contains(self, x: np.ndarray) -> bool:
        """Membership test; must not depend on anything but the region data and x."""


def membership(region: ValidityRegion, x: np.ndarray) -> tuple[bool, int]:
    return region.contains(x), region.flops
