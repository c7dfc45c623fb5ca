"""Epsilon-greedy online learners playing repeated mediated games.

Each agent runs an independent bandit over its mediated arm space (original
action crossed with the delegation bit).  Exploration probability is
min(1, 1/t) with t counting the agent's own plays from 1, so the first step
is always uniform.  Arm value estimates are exact running means, initialized
at zero, with greedy ties broken toward the lowest arm index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .games import Game
from .mediators import MediatorKind, build_mediated_tables, coerce_kind


def epsilon_at(t: int) -> float:
    """Exploration probability for play number t (counted from 1)."""
    return min(1.0, 1.0 / t)


class LearnerState:
    """Running statistics of one epsilon-greedy agent."""

    __slots__ = ("mean_reward", "pull_count", "step", "rng")

    def __init__(self, num_arms: int, seed) -> None:
        if num_arms < 1:
            raise ValueError(f"need at least one arm, got {num_arms}")
        self.mean_reward = np.zeros(num_arms)
        self.pull_count = np.zeros(num_arms, dtype=np.int64)
        self.step = 0
        self.rng = np.random.default_rng(seed)

    @property
    def num_arms(self) -> int:
        return len(self.mean_reward)

    def select_arm(self) -> int:
        t = self.step + 1
        if self.rng.random() < epsilon_at(t):
            return int(self.rng.integers(self.num_arms))
        return int(np.argmax(self.mean_reward))

    def update(self, arm: int, reward: float) -> None:
        self.pull_count[arm] += 1
        self.mean_reward[arm] += (reward - self.mean_reward[arm]) / self.pull_count[arm]
        self.step += 1


@dataclass(frozen=True)
class Trajectory:
    """Per-step record of one episode: rewards, delegation bits, resolved actions."""

    rewards: np.ndarray    # (T, N) realized utility per agent
    delegated: np.ndarray  # (T, N) whether each agent delegated
    resolved: np.ndarray   # (T, N) mediator-resolved action per agent

    @property
    def horizon(self) -> int:
        return self.rewards.shape[0]

    @property
    def num_agents(self) -> int:
        return self.rewards.shape[1]


def run_episode(env, horizon: int, seed) -> Trajectory:
    """Play one episode of a mediated environment with independent learners.

    The environment must expose ``num_agents``, ``arm_counts`` (arms per
    agent) and ``step(arms) -> (rewards, delegated, resolved)``.  Per-agent
    seeds are spawned deterministically from the master seed.
    """
    if horizon < 0:
        raise ValueError(f"horizon must be nonnegative, got {horizon}")
    n = env.num_agents
    seed_seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    agents = [LearnerState(env.arm_counts[i], s) for i, s in enumerate(seed_seq.spawn(n))]
    rewards = np.empty((horizon, n))
    delegated = np.empty((horizon, n), dtype=bool)
    resolved = np.empty((horizon, n), dtype=np.int64)
    for t in range(horizon):
        arms = [agent.select_arm() for agent in agents]
        r, d, res = env.step(arms)
        for i, agent in enumerate(agents):
            agent.update(arms[i], r[i])
        rewards[t] = r
        delegated[t] = d
        resolved[t] = res
    return Trajectory(rewards, delegated, resolved)


class MatrixGameEnv:
    """Repeated normal-form game, optionally wrapped by a mediator.

    With a mediator, each agent's arms are the 2k mediated actions and every
    step is a precomputed table lookup of the resolved payoffs.  Without one,
    agents play the original k actions directly and never delegate.
    """

    def __init__(self, game: Game, kind=MediatorKind.NONE) -> None:
        self.kind = coerce_kind(kind)
        self.game = game
        self.num_agents = game.num_players
        if self.kind is MediatorKind.NONE:
            self.arm_counts = tuple(game.action_counts)
            self._payoffs = game.payoffs
            self._resolved = None
        else:
            mediated, resolved_table = build_mediated_tables(game, self.kind)
            self.arm_counts = tuple(mediated.action_counts)
            self._payoffs = mediated.payoffs
            self._resolved = resolved_table

    def step(self, arms):
        cell = tuple(arms)
        rewards = self._payoffs[cell]
        if self._resolved is None:
            delegated = np.zeros(self.num_agents, dtype=bool)
            resolved = np.asarray(arms, dtype=np.int64)
        else:
            delegated = np.array(
                [a >= k for a, k in zip(arms, self.game.action_counts)], dtype=bool
            )
            resolved = self._resolved[cell]
        return rewards, delegated, resolved
