"""Max-weight rectangular assignment with forbidden agent-slot pairs.

Forbidden pairs are marked with ``FORBIDDEN`` (negative infinity) in the
weight matrix.  Internally they are replaced by a large finite sentinel that
any all-feasible assignment strictly dominates, so no non-finite value enters
the arithmetic, and the optimum is exact.  The search itself is delegated to
scipy's shortest-augmenting-path solver (a modified Jonker-Volgenant method),
which is deterministic given the input order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InfeasibleAssignmentError

FORBIDDEN = -np.inf


@dataclass(frozen=True)
class AssignmentProblem:
    """num_agents x num_slots weights; FORBIDDEN marks infeasible pairs."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2:
            raise ValueError(f"weights must be a 2-D matrix, got shape {w.shape}")
        if w.shape[0] > w.shape[1]:
            raise ValueError(
                f"need at least as many slots as agents, got {w.shape[0]} agents "
                f"and {w.shape[1]} slots"
            )
        finite = w[np.isfinite(w)]
        if np.any(np.isnan(w)) or np.any(w == np.inf):
            raise ValueError("weights must be finite or FORBIDDEN (-inf)")
        del finite
        object.__setattr__(self, "weights", w)

    @property
    def num_agents(self) -> int:
        return self.weights.shape[0]

    @property
    def num_slots(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class Assignment:
    """Injective agent-to-slot map plus its total weight."""

    slot_of: tuple[int, ...]
    total_weight: float


def solve_assignment(problem: AssignmentProblem) -> Assignment:
    """Exact maximum-weight assignment of every agent to a distinct slot.

    Raises InfeasibleAssignmentError, naming an offending agent, when some
    agent cannot be given a non-forbidden slot.
    """
    w = problem.weights
    allowed = w != FORBIDDEN
    rows_ok = allowed.any(axis=1)
    if not rows_ok.all():
        agent = int(np.flatnonzero(~rows_ok)[0])
        raise InfeasibleAssignmentError(
            f"agent {agent} has no feasible slot (all {problem.num_slots} forbidden)"
        )
    feasible_vals = w[allowed]
    lo = float(feasible_vals.min())
    hi = float(feasible_vals.max())
    # One forbidden edge must cost more than the full spread of any feasible
    # assignment, so the solver only picks it when no alternative exists.
    sentinel = lo - (hi - lo + 1.0) * problem.num_agents - 1.0
    costs = np.where(allowed, -w, -sentinel)
    rows, cols = linear_sum_assignment(costs)
    slot_of = np.empty(problem.num_agents, dtype=np.int64)
    slot_of[rows] = cols
    chosen = w[np.arange(problem.num_agents), slot_of]
    if np.any(chosen == FORBIDDEN):
        agent = int(np.flatnonzero(chosen == FORBIDDEN)[0])
        raise InfeasibleAssignmentError(
            f"agent {agent} cannot be assigned: every completion uses a forbidden slot"
        )
    return Assignment(tuple(int(s) for s in slot_of), float(chosen.sum()))
