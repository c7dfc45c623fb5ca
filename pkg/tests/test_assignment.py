import numpy as np
import pytest

from medgames import (
    FORBIDDEN,
    Assignment,
    AssignmentProblem,
    InfeasibleAssignmentError,
    solve_assignment,
)
from oracles import assignment_oracle


def random_problem(rng, num_agents, num_slots, forbidden_share=0.2):
    """Random weights with forbidden entries, feasible by construction."""
    while True:
        weights = rng.random((num_agents, num_slots)) * 10 - 2
        mask = rng.random((num_agents, num_slots)) < forbidden_share
        weights = np.where(mask, FORBIDDEN, weights)
        if assignment_oracle(weights) > -np.inf:
            return weights


class TestSolveAssignment:
    def test_identity_optimum(self):
        result = solve_assignment(AssignmentProblem(np.array([[1.0, 0.0], [0.0, 1.0]])))
        assert result.slot_of == (0, 1)
        assert result.total_weight == 2.0

    def test_swap_optimum(self):
        result = solve_assignment(AssignmentProblem(np.array([[2.0, 3.0], [3.0, 2.0]])))
        assert result.slot_of == (1, 0)
        assert result.total_weight == 6.0

    def test_rectangular_with_forbidden(self):
        weights = np.array(
            [
                [FORBIDDEN, 5.0, 1.0],
                [4.0, FORBIDDEN, 2.0],
            ]
        )
        result = solve_assignment(AssignmentProblem(weights))
        assert result.slot_of == (1, 0)
        assert result.total_weight == 9.0

    def test_matches_brute_force_6x8(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            weights = random_problem(rng, 6, 8)
            result = solve_assignment(AssignmentProblem(weights))
            assert result.total_weight == pytest.approx(assignment_oracle(weights), abs=1e-9)

    def test_injective_and_feasible(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            weights = random_problem(rng, 5, 7)
            result = solve_assignment(AssignmentProblem(weights))
            assert len(set(result.slot_of)) == 5
            chosen = weights[np.arange(5), list(result.slot_of)]
            assert np.all(chosen > FORBIDDEN)
            assert result.total_weight == pytest.approx(chosen.sum(), abs=1e-12)

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(77)
        weights = random_problem(rng, 5, 6)
        base = solve_assignment(AssignmentProblem(weights))
        perm = rng.permutation(5)
        permuted = solve_assignment(AssignmentProblem(weights[perm]))
        assert permuted.total_weight == pytest.approx(base.total_weight, abs=1e-12)
        assert tuple(base.slot_of[p] for p in perm) == permuted.slot_of

    def test_infeasible_agent_named(self):
        weights = np.array([[1.0, 2.0], [FORBIDDEN, FORBIDDEN]])
        with pytest.raises(InfeasibleAssignmentError, match="agent 1"):
            solve_assignment(AssignmentProblem(weights))

    def test_combinatorial_infeasibility_detected(self):
        # Both agents only allow slot 0.
        weights = np.array([[1.0, FORBIDDEN], [2.0, FORBIDDEN]])
        with pytest.raises(InfeasibleAssignmentError):
            solve_assignment(AssignmentProblem(weights))

    def test_more_agents_than_slots_rejected(self):
        with pytest.raises(ValueError):
            AssignmentProblem(np.ones((3, 2)))

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            AssignmentProblem(np.array([[np.nan, 1.0]]))

    def test_deterministic(self):
        rng = np.random.default_rng(8)
        weights = random_problem(rng, 6, 9)
        first = solve_assignment(AssignmentProblem(weights))
        again = solve_assignment(AssignmentProblem(weights.copy()))
        assert first == again == Assignment(first.slot_of, first.total_weight)
