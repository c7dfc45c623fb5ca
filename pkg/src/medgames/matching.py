"""Mutual-matching game: agents point at each other and matched pairs earn.

Agent i earns reward[i][j] when it points at j and j points back; everyone
else earns zero.  Rewards are asymmetric in general and the diagonal is never
read.  The Pareto mediator pairs up unmatched delegators (maximizing the
summed two-way reward of the chosen pairs), which can only help them because
unmatched agents earn nothing and rewards are nonnegative.  The Punishing
mediator breaks every delegator/non-delegator match, unless everyone
delegates, in which case it pairs the whole population welfare-maximally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidActionError
from .games import MediatedProfile
from .mediators import MediatorKind, coerce_kind

# Above this many nodes, exact pairing search gives way to greedy
# heaviest-pair-first (any pairing of unmatched delegators preserves the
# Pareto guarantee, so only welfare optimality is traded away).
EXHAUSTIVE_PAIRING_LIMIT = 10


@dataclass(frozen=True)
class MatchingInstance:
    """Pairwise reward matrix for a population of agents."""

    reward: np.ndarray
    seed: int | None = None

    def __post_init__(self) -> None:
        r = np.asarray(self.reward, dtype=float)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValueError(f"reward must be a square matrix, got shape {r.shape}")
        if r.shape[0] < 2:
            raise ValueError("matching needs at least two agents")
        r = np.ascontiguousarray(r)
        r.flags.writeable = False
        object.__setattr__(self, "reward", r)

    @property
    def num_agents(self) -> int:
        return self.reward.shape[0]


def generate_matching_instance(num_agents: int, seed) -> MatchingInstance:
    """Rewards drawn uniformly from [0, 1); the diagonal is left unused."""
    rng = np.random.default_rng(seed)
    seed_val = seed if isinstance(seed, int) else None
    return MatchingInstance(rng.random((num_agents, num_agents)), seed=seed_val)


def _check_choices(instance: MatchingInstance, choices) -> np.ndarray:
    c = np.asarray(choices, dtype=np.int64)
    n = instance.num_agents
    if c.shape != (n,):
        raise InvalidActionError(f"expected {n} choices, got shape {c.shape}")
    if np.any((c < 0) | (c >= n)):
        raise InvalidActionError("choice out of range")
    self_pointers = np.flatnonzero(c == np.arange(n))
    if len(self_pointers):
        raise InvalidActionError(f"agent {int(self_pointers[0])} points at itself")
    return c


def payoff(instance: MatchingInstance, choices) -> np.ndarray:
    """Realized reward vector: reward[i][c_i] if the pick is mutual, else 0."""
    c = _check_choices(instance, choices)
    mutual = c[c] == np.arange(instance.num_agents)
    return np.where(mutual, instance.reward[np.arange(instance.num_agents), c], 0.0)


def _pair_weights(instance: MatchingInstance, nodes: list[int]) -> np.ndarray:
    w = instance.reward[np.ix_(nodes, nodes)]
    return w + w.T


def _exact_pairing(nodes: list[int], weights: np.ndarray) -> list[tuple[int, int]]:
    """Max-weight pairing by dynamic programming over node subsets."""
    k = len(nodes)
    size = 1 << k
    value = np.full(size, -np.inf)
    value[0] = 0.0
    parent: list[tuple[int, int] | None] = [None] * size
    for mask in range(size - 1):
        v = value[mask]
        if v == -np.inf:
            continue
        i = 0
        while mask >> i & 1:
            i += 1
        skip = mask | (1 << i)
        if v > value[skip]:
            value[skip] = v
            parent[skip] = (i, i)
        for j in range(i + 1, k):
            if mask >> j & 1:
                continue
            take = skip | (1 << j)
            cand = v + weights[i, j]
            if cand > value[take]:
                value[take] = cand
                parent[take] = (i, j)
    pairs = []
    mask = size - 1
    while mask:
        i, j = parent[mask]
        if i != j:
            pairs.append((nodes[i], nodes[j]))
            mask &= ~(1 << j)
        mask &= ~(1 << i)
    return pairs


def _greedy_pairing(nodes: list[int], weights: np.ndarray) -> list[tuple[int, int]]:
    k = len(nodes)
    candidates = sorted(
        ((i, j) for i in range(k) for j in range(i + 1, k)),
        key=lambda ij: (-weights[ij], ij),
    )
    free = [True] * k
    pairs = []
    for i, j in candidates:
        if free[i] and free[j]:
            pairs.append((nodes[i], nodes[j]))
            free[i] = free[j] = False
    return pairs


def max_weight_pairing(instance: MatchingInstance, nodes) -> list[tuple[int, int]]:
    """Pairing of the given agents maximizing summed two-way rewards.

    Exact for up to EXHAUSTIVE_PAIRING_LIMIT nodes, greedy beyond.
    """
    nodes = sorted(int(i) for i in nodes)
    if len(nodes) < 2:
        return []
    weights = _pair_weights(instance, nodes)
    if len(nodes) <= EXHAUSTIVE_PAIRING_LIMIT:
        return _exact_pairing(nodes, weights)
    return _greedy_pairing(nodes, weights)


def _mutual_mask(choices: np.ndarray) -> np.ndarray:
    return choices[choices] == np.arange(len(choices))


def pareto_mediate_matching(instance: MatchingInstance, sm: MediatedProfile) -> tuple[int, ...]:
    """Rewire unmatched delegators into welfare-maximal mutual pairs.

    Delegators already in a mutual match are untouched, as are all
    non-delegators.  With fewer than two delegators nothing changes.
    """
    choices = _check_choices(instance, sm.actions)
    delegators = sm.delegators
    if len(delegators) < 2:
        return tuple(int(c) for c in choices)
    mutual = _mutual_mask(choices)
    unmatched = [i for i in delegators if not mutual[i]]
    resolved = choices.copy()
    for i, j in max_weight_pairing(instance, unmatched):
        resolved[i] = j
        resolved[j] = i
    return tuple(int(c) for c in resolved)


def punish_mediate_matching(instance: MatchingInstance, sm: MediatedProfile) -> tuple[int, ...]:
    """Break delegator/non-delegator matches; pair everyone when all delegate.

    A delegator whose mutual partner did not delegate is pointed away from
    the partner: at the lowest-index other delegator when one exists, else at
    the lowest-index agent that is neither itself nor the partner.
    """
    choices = _check_choices(instance, sm.actions)
    delegators = sm.delegators
    n = instance.num_agents
    if not delegators:
        return tuple(int(c) for c in choices)
    resolved = choices.copy()
    if len(delegators) == n:
        for i, j in max_weight_pairing(instance, range(n)):
            resolved[i] = j
            resolved[j] = i
        return tuple(int(c) for c in resolved)
    dset = set(delegators)
    mutual = _mutual_mask(choices)
    for i in delegators:
        partner = int(choices[i])
        if not mutual[i] or partner in dset:
            continue
        target = next((k for k in delegators if k != i), None)
        if target is None:
            target = next((k for k in range(n) if k not in (i, partner)), None)
        if target is not None:
            resolved[i] = target
    return tuple(int(c) for c in resolved)


class MatchingEnv:
    """Matching game as a mediated bandit environment.

    Actions index the n-1 possible targets (skipping the agent itself); with
    a mediator the arm space doubles to carry the delegation bit.
    """

    def __init__(self, instance: MatchingInstance, kind=MediatorKind.NONE) -> None:
        self.instance = instance
        self.kind = coerce_kind(kind)
        self.num_agents = instance.num_agents
        per_agent = self.num_agents - 1
        if self.kind is not MediatorKind.NONE:
            per_agent *= 2
        self.arm_counts = (per_agent,) * self.num_agents

    def _decode(self, arms):
        n = self.num_agents
        targets = np.empty(n, dtype=np.int64)
        delegated = np.zeros(n, dtype=bool)
        for i, arm in enumerate(arms):
            a = arm
            if self.kind is not MediatorKind.NONE and a >= n - 1:
                a -= n - 1
                delegated[i] = True
            targets[i] = a + 1 if a >= i else a
        return targets, delegated

    def step(self, arms):
        targets, delegated = self._decode(arms)
        if self.kind is MediatorKind.NONE:
            resolved = tuple(int(t) for t in targets)
        else:
            sm = MediatedProfile(tuple(int(t) for t in targets), tuple(bool(d) for d in delegated))
            if self.kind is MediatorKind.PARETO:
                resolved = pareto_mediate_matching(self.instance, sm)
            else:
                resolved = punish_mediate_matching(self.instance, sm)
        rewards = payoff(self.instance, resolved)
        return rewards, delegated, np.asarray(resolved, dtype=np.int64)
