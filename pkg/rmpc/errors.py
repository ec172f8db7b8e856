"""
Exception hierarchy.

Every failure the numerical layers can signal has its own class so callers can
decide what is fatal: the controller aborts a trajectory on InfeasibleState, the
batch runner logs it and moves on, the CLI maps problem-file errors to exit code 2.
"""


class RmpcError(Exception):
    """Base class for all errors raised by this package."""


# ── synthesis ────────────────────────────────────────────────────────────────


class NoConvergence(RmpcError):
    """Riccati iteration did not settle; the data is most likely not stabilizable."""


class SingularGainSystem(RmpcError):
    """R + B'PB is numerically singular."""


class NotFinitelyDetermined(RmpcError):
    """Maximal admissible set iteration hit its step cap."""


class DimensionMismatch(RmpcError):
    """Problem matrices have inconsistent shapes."""


# ── LP / QP ──────────────────────────────────────────────────────────────────


class InfeasibleQP(RmpcError):
    """The condensed QP has no feasible point for the given state (x ∉ X_f)."""


class MaxIterations(RmpcError):
    """Iteration guard of the QP or LP engine tripped."""


class LPUnbounded(RmpcError):
    """Linear program is unbounded in the requested direction."""


class LPEmpty(RmpcError):
    """Linear program has an empty feasible set."""


# ── regions ──────────────────────────────────────────────────────────────────


class DegenerateActiveSet(RmpcError):
    """Active constraint rows are linearly dependent (G^A lacks full row rank)."""

    def __init__(self, message: str, active: tuple[int, ...]):
        super().__init__(message)
        self.active = active


class ProjectionTooLarge(RmpcError):
    """Fourier–Motzkin elimination exceeded the configured row or variable budget."""


class SingularClosedLoop(RmpcError):
    """A + BK is not invertible, so the stability quadric cannot be built."""


# ── closed loop / network / experiments ─────────────────────────────────────


class InfeasibleState(RmpcError):
    """A QP event happened at a state outside X_f; the trajectory is aborted."""


class MalformedPacket(RmpcError):
    """Law packet bytes do not match the wire layout."""


class SamplingExhausted(RmpcError):
    """Rejection sampling of feasible initial states accepted too few draws."""


class MissingBaseline(RmpcError):
    """A report was requested without an optimal-mode run to compare against."""
