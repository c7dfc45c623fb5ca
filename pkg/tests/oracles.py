"""Independent brute-force oracles used to cross-check the library.

Everything here is deliberately written with plain loops and explicit
enumeration, sharing no code path with the implementations under test.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


def random_game_payoffs(rng, action_counts, num_players=None):
    if num_players is None:
        num_players = len(action_counts)
    return rng.random(tuple(action_counts) + (num_players,))


def nash_oracle(action_counts, payoffs):
    """Pure Nash profiles via an explicit all-deviations double loop."""
    equilibria = []
    for profile in itertools.product(*(range(k) for k in action_counts)):
        is_nash = True
        for player, k in enumerate(action_counts):
            current = payoffs[profile][player]
            for alt in range(k):
                deviated = list(profile)
                deviated[player] = alt
                if payoffs[tuple(deviated)][player] > current:
                    is_nash = False
                    break
            if not is_nash:
                break
        if is_nash:
            equilibria.append(profile)
    return equilibria


def pareto_mediator_oracle(action_counts, payoffs, actions, delegate):
    """Constraint-filter-then-argmax scan for the Pareto mediator.

    Prefers the submitted profile on ties, then the lexicographically
    smallest reassignment of the delegators' actions.
    """
    delegators = [i for i, d in enumerate(delegate) if d]
    if len(delegators) < 2:
        return tuple(actions)
    submitted = tuple(actions)
    base = payoffs[submitted]
    best_value = None
    best_profile = None
    for replacement in itertools.product(*(range(action_counts[i]) for i in delegators)):
        candidate = list(submitted)
        for player, a in zip(delegators, replacement):
            candidate[player] = a
        candidate = tuple(candidate)
        u = payoffs[candidate]
        if any(u[i] < base[i] for i in delegators):
            continue
        value = sum(u[i] for i in delegators)
        if best_value is None or value > best_value:
            best_value = value
            best_profile = candidate
    submitted_value = sum(base[i] for i in delegators)
    if submitted_value == best_value:
        return submitted
    return best_profile


def punish_mediator_oracle(action_counts, payoffs, actions, delegate):
    """Literal scan for the Punishing mediator with the same tie rule."""
    n = len(action_counts)
    delegators = [i for i, d in enumerate(delegate) if d]
    submitted = tuple(actions)
    if not delegators:
        return submitted
    if len(delegators) == n:
        best_value = None
        best_profile = None
        for candidate in itertools.product(*(range(k) for k in action_counts)):
            value = sum(payoffs[candidate])
            if best_value is None or value > best_value:
                best_value = value
                best_profile = candidate
        if sum(payoffs[submitted]) == best_value:
            return submitted
        return best_profile
    outsiders = [i for i in range(n) if i not in delegators]
    best_value = None
    best_profile = None
    for replacement in itertools.product(*(range(action_counts[i]) for i in delegators)):
        candidate = list(submitted)
        for player, a in zip(delegators, replacement):
            candidate[player] = a
        candidate = tuple(candidate)
        value = sum(payoffs[candidate][i] for i in outsiders)
        if best_value is None or value < best_value:
            best_value = value
            best_profile = candidate
    if sum(payoffs[submitted][i] for i in outsiders) == best_value:
        return submitted
    return best_profile


@lru_cache(maxsize=None)
def _all_injections(num_agents: int, num_slots: int) -> np.ndarray:
    """Every injective agent-to-slot map, as a (count, num_agents) array."""
    return np.array(list(itertools.permutations(range(num_slots), num_agents)), dtype=np.int64)


def assignment_oracle(weights: np.ndarray) -> float:
    """Best total weight over all injections; forbidden entries are -inf."""
    n, m = weights.shape
    injections = _all_injections(n, m)
    totals = weights[np.arange(n)[None, :], injections].sum(axis=1)
    return float(totals.max())


def assignment_oracle_argmax(weights: np.ndarray) -> tuple[float, tuple[int, ...]]:
    n, m = weights.shape
    injections = _all_injections(n, m)
    totals = weights[np.arange(n)[None, :], injections].sum(axis=1)
    best = int(totals.argmax())
    return float(totals[best]), tuple(int(s) for s in injections[best])


def all_perfect_pairings(nodes):
    """Yield every pairing of an even-sized node list (as frozensets of pairs)."""
    nodes = list(nodes)
    if not nodes:
        yield []
        return
    first = nodes[0]
    for idx in range(1, len(nodes)):
        partner = nodes[idx]
        rest = nodes[1:idx] + nodes[idx + 1 :]
        for sub in all_perfect_pairings(rest):
            yield [(first, partner)] + sub


def best_pairing_weight(nodes, pair_weight) -> float:
    """Max total weight over perfect pairings (even count) or near-perfect (odd)."""
    nodes = list(nodes)
    if len(nodes) < 2:
        return 0.0
    if len(nodes) % 2 == 1:
        return max(
            best_pairing_weight(nodes[:i] + nodes[i + 1 :], pair_weight)
            for i in range(len(nodes))
        )
    return max(
        sum(pair_weight(i, j) for i, j in pairing)
        for pairing in all_perfect_pairings(nodes)
    )
