"""
Tests for the simplex engine, the polytope helpers built on it and the dual
active-set QP solver.

The QP solver is checked against an exhaustive KKT enumeration over every
linearly independent candidate active set of Example 1.
"""

import itertools

import numpy as np
import pytest
from errors import InfeasibleQP, LPEmpty, LPUnbounded
from experiments.sampling import sample_initial_states
from qp_solver.active_set import DualActiveSetSolver, active_set, is_feasible, solve_qp
from qp_solver.simplex import (
    chebyshev_center,
    clean_rows,
    is_subset,
    lp_max,
    max_violation,
    remove_redundant,
)
from scipy.optimize import linprog
from synthesis.polytope import Polytope

UNIT_BOX = Polytope.from_box(np.zeros(2) - 1.0, np.ones(2))


class TestLpMax:
    def test_unit_box(self):
        result = lp_max(UNIT_BOX, np.array([1.0, 1.0]))
        assert result.value == pytest.approx(2.0)
        np.testing.assert_allclose(result.argmax, [1.0, 1.0], atol=1e-12)

    def test_empty_interval(self):
        empty = Polytope(np.array([[1.0], [-1.0]]), np.array([-1.0, -1.0]))
        with pytest.raises(LPEmpty):
            lp_max(empty, np.array([1.0]))

    def test_unbounded_direction(self):
        half_plane = Polytope(np.array([[1.0, 0.0]]), np.array([1.0]))
        with pytest.raises(LPUnbounded):
            lp_max(half_plane, np.array([0.0, 1.0]))

    def test_no_rows(self):
        free = Polytope.empty_rows(2)
        assert lp_max(free, np.zeros(2)).value == 0.0
        with pytest.raises(LPUnbounded):
            lp_max(free, np.array([1.0, 0.0]))

    def test_origin_outside_polytope_needs_phase_one(self):
        shifted = Polytope.from_box(np.array([2.0, 3.0]), np.array([4.0, 5.0]))
        result = lp_max(shifted, np.array([-1.0, -1.0]))
        assert result.value == pytest.approx(-5.0)

    def test_matches_linprog_on_random_polytopes(self, rng):
        for _ in range(30):
            T = rng.normal(size=(12, 3))
            d = rng.uniform(0.5, 2.0, size=12)
            box = Polytope.from_box(-5 * np.ones(3), 5 * np.ones(3))
            poly = Polytope(T, d).intersect(box)
            c = rng.normal(size=3)
            oracle = linprog(-c, A_ub=poly.T, b_ub=poly.d, bounds=[(None, None)] * 3)
            assert lp_max(poly, c).value == pytest.approx(-oracle.fun, abs=1e-8)


class TestPolytopeHelpers:
    def test_clean_rows_merges_duplicates_keeping_tightest(self):
        T = np.array([[2.0, 0.0], [1.0, 0.0], [0.0, 0.0]])
        cleaned = clean_rows(T, np.array([4.0, 1.0, 3.0]))
        assert cleaned.rows == 1
        assert cleaned.d[0] == pytest.approx(1.0)

    def test_clean_rows_rejects_negative_zero_row(self):
        with pytest.raises(LPEmpty):
            clean_rows(np.array([[0.0, 0.0]]), np.array([-1.0]))

    def test_remove_redundant(self):
        T = np.vstack([UNIT_BOX.T, [[1.0, 1.0]], [[1.0, 0.0]]])
        d = np.concatenate([UNIT_BOX.d, [5.0], [3.0]])
        reduced = remove_redundant(Polytope(T, d))
        assert reduced.rows == 4

    def test_subset_and_violation(self):
        small = Polytope.from_box(-0.5 * np.ones(2), 0.5 * np.ones(2))
        assert is_subset(small, UNIT_BOX)
        assert not is_subset(UNIT_BOX, small)
        assert max_violation(UNIT_BOX, small) == pytest.approx(0.5)

    def test_chebyshev_center_of_box(self):
        box = Polytope.from_box(np.array([0.0, 0.0]), np.array([4.0, 2.0]))
        center, radius = chebyshev_center(box)
        assert radius == pytest.approx(1.0)
        assert center[1] == pytest.approx(1.0)


def _kkt_candidates(qp):
    """Affine primal/dual maps of every linearly independent candidate active set."""
    H_inv = np.linalg.inv(qp.H)
    groups = []
    for size in range(qp.variables + 1):
        K_list, b_list, L_list, l_list = [], [], [], []
        for subset in itertools.combinations(range(qp.q), size):
            idx = list(subset)
            G_A = qp.G[idx]
            if size and np.linalg.matrix_rank(G_A) < size:
                continue
            if size:
                M = G_A @ H_inv @ G_A.T
                L = -np.linalg.solve(M, G_A @ H_inv @ qp.F.T + qp.E[idx])
                ell = -np.linalg.solve(M, qp.w[idx])
            else:
                L, ell = np.zeros((0, qp.n)), np.zeros(0)
            K_list.append(-H_inv @ (qp.F.T + G_A.T @ L))
            b_list.append(-H_inv @ G_A.T @ ell)
            L_list.append(L)
            l_list.append(ell)
        if K_list:
            groups.append((np.array(K_list), np.array(b_list), np.array(L_list), np.array(l_list)))
    return groups


def _enumeration_oracle(qp, groups, x):
    best = None
    for K, b, L, ell in groups:
        U = K @ x + b
        primal = (U @ qp.G.T - qp.w - qp.E @ x).max(axis=1)
        dual = (L @ x + ell).min(axis=1) if L.shape[1] else np.zeros(len(U))
        ok = (primal <= 1e-9) & (dual >= -1e-9)
        for candidate in U[ok]:
            value = qp.objective(x, candidate)
            if best is None or value < best[0]:
                best = (value, candidate)
    return best


@pytest.fixture(scope="module")
def kkt_groups(example1_qp):
    return _kkt_candidates(example1_qp)


@pytest.fixture(scope="module")
def oracle_states(example1_qp):
    return sample_initial_states(example1_qp, 200, seed=31)


class TestDualActiveSet:
    def test_origin_has_zero_solution(self, example1_qp):
        solution = solve_qp(example1_qp, np.zeros(2))
        np.testing.assert_allclose(solution.U_bar, 0.0, atol=1e-14)
        assert solution.active == ()
        assert solution.value == pytest.approx(0.0)

    def test_far_state_is_infeasible(self, example1_qp):
        with pytest.raises(InfeasibleQP):
            solve_qp(example1_qp, np.array([3.0, 3.0]) * 10)
        assert not is_feasible(example1_qp, np.array([30.0, 30.0]))

    def test_matches_enumeration_oracle(self, example1_qp, kkt_groups, oracle_states):
        solver = DualActiveSetSolver(example1_qp)
        for x in oracle_states:
            solution = solver.solve(x)
            value, U = _enumeration_oracle(example1_qp, kkt_groups, x)
            assert solution.value == pytest.approx(value, rel=1e-8, abs=1e-8)
            np.testing.assert_allclose(solution.U_bar, U, atol=1e-6)

    def test_solution_is_feasible_and_multipliers_nonnegative(self, example1_qp, feasible_states):
        for x in feasible_states:
            solution = solve_qp(example1_qp, x)
            assert np.all(example1_qp.slack(x, solution.U_bar) <= 1e-8)
            assert np.all(solution.multipliers >= -1e-10)

    def test_active_set_partitions_rows(self, example1_qp, feasible_states):
        x = feasible_states[0]
        solution = solve_qp(example1_qp, x)
        active, inactive = active_set(example1_qp, x, solution.U_bar)
        assert sorted(active + inactive) == list(range(example1_qp.q))
        assert active == solution.active

    def test_positive_multipliers_are_active(self, example1_qp, feasible_states):
        for x in feasible_states:
            solution = solve_qp(example1_qp, x)
            for i in np.flatnonzero(solution.multipliers > 1e-8):
                assert i in solution.active

    def test_stationarity_and_complementarity(self, example1_qp, oracle_states):
        qp = example1_qp
        for x in oracle_states:
            solution = solve_qp(qp, x)
            mu = solution.multipliers
            terms = (qp.H @ solution.U_bar, qp.F.T @ x, qp.G.T @ mu)
            scale = 1.0 + max(np.abs(term).max() for term in terms)
            np.testing.assert_allclose(sum(terms), 0.0, atol=1e-9 * scale)
            complementarity = mu * qp.slack(x, solution.U_bar)
            np.testing.assert_allclose(complementarity, 0.0, atol=1e-9 * scale)

    def test_repeated_solves_are_bit_identical(self, example1_qp, oracle_states):
        shared = DualActiveSetSolver(example1_qp)
        for x in oracle_states[:50]:
            first = shared.solve(x)
            again = shared.solve(x)
            fresh = DualActiveSetSolver(example1_qp).solve(x)
            for other in (again, fresh):
                np.testing.assert_array_equal(first.U_bar, other.U_bar)
                np.testing.assert_array_equal(first.multipliers, other.multipliers)
                assert first.active == other.active
                assert first.value == other.value
