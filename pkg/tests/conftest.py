"""
Shared pytest fixtures and configuration.

conftest.py is auto-loaded by pytest; fixtures defined here are available
to all test files without explicit imports. Synthesis of the examples is
session-scoped: every test shares one CondensedQP per example.
"""

import os
import sys

import numpy as np
import pytest

# Add the application directory to the path so tests can import its modules
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "rmpc"))

from models import ProblemSpec  # noqa: E402
from problems import example1  # noqa: E402
from qp_solver.active_set import solve_qp  # noqa: E402
from regions.laws import law_for_active_set  # noqa: E402
from synthesis.condensing import condense  # noqa: E402


@pytest.fixture(scope="session")
def example1_spec() -> ProblemSpec:
    return example1()


@pytest.fixture(scope="session")
def example1_qp(example1_spec):
    return condense(example1_spec)


@pytest.fixture(scope="session")
def feasible_states(example1_qp):
    """60 seeded feasible states of Example 1."""
    from experiments.sampling import sample_initial_states

    return sample_initial_states(example1_qp, 60, seed=7)


@pytest.fixture(scope="session")
def example1_laws(example1_qp, feasible_states):
    """Distinct (law, P*) pairs obtained from QPs at the feasible states."""
    seen = {}
    for x in feasible_states:
        law, optimal = law_for_active_set(example1_qp, solve_qp(example1_qp, x).active)
        seen.setdefault(law.key, (law, optimal, x))
    return list(seen.values())


@pytest.fixture
def toy_problem() -> ProblemSpec:
    """Scalar integrator-like plant with a one-step horizon."""
    return ProblemSpec(
        A=[[1.2]],
        B=[[1.0]],
        Q=[[1.0]],
        R=[[1.0]],
        N=1,
        x_bounds=[(-5.0, 5.0)],
        u_bounds=[(-1.0, 1.0)],
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
