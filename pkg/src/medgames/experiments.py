"""Experiment orchestration: seeded runs, windowed aggregation, CSV output.

Every scenario samples one environment per seed, runs independent
epsilon-greedy learners for the configured horizon, and reduces the
trajectory to non-overlapping windows (mean population reward, minimum
per-agent window mean, delegation fraction).  Seeds may be distributed over
a process pool; rows are always emitted in seed order so output is
deterministic regardless of completion order.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError
from .games import Game, build_mediated_game, enumerate_pure_nash, social_welfare
from .learning import MatrixGameEnv, Trajectory, run_episode
from .matching import MatchingEnv, generate_matching_instance
from .mediators import MediatorKind, coerce_kind
from .restaurant import RatingsTable, RestaurantEnv, central_plan, generate_instance

SCENARIOS = ("random-games", "matching", "restaurant", "mediated-table", "nash", "verify-props")


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    mediator: str = "none"
    players: int = 2
    actions: int = 4
    agents: int = 16
    restaurants: int = 60
    alpha: float = 0.0
    horizon: int = 10_000
    seeds: tuple[int, ...] = (0,)
    window: int = 100
    out: str | None = None
    ratings: str | None = None
    capacities: str | None = None
    jobs: int = 1

    def validated(self) -> "ExperimentConfig":
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        coerce_kind(self.mediator)
        for name in ("players", "actions", "agents", "restaurants", "horizon", "window", "jobs"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.alpha < 0:
            raise ConfigError(f"alpha must be nonnegative, got {self.alpha}")
        if not self.seeds:
            raise ConfigError("need at least one seed")
        if self.window > self.horizon:
            raise ConfigError(
                f"window ({self.window}) cannot exceed horizon ({self.horizon})"
            )
        return self


@dataclass(frozen=True)
class WindowRecord:
    seed: int
    window_start: int
    mean_reward: float
    min_reward: float
    delegation_fraction: float
    central_plan_reward: float | None = None


@dataclass
class RunSummary:
    """All window rows of a run plus per-seed final-window aggregates."""

    scenario: str
    mediator: str
    window: int
    rows: list[WindowRecord] = field(default_factory=list)

    @property
    def has_central_plan(self) -> bool:
        return any(r.central_plan_reward is not None for r in self.rows)

    @property
    def seeds(self) -> list[int]:
        return sorted({r.seed for r in self.rows})

    def final_rows(self) -> list[WindowRecord]:
        """The last window of every seed, in seed order."""
        last: dict[int, WindowRecord] = {}
        for row in self.rows:
            prev = last.get(row.seed)
            if prev is None or row.window_start > prev.window_start:
                last[row.seed] = row
        return [last[s] for s in sorted(last)]

    def final_stats(self) -> dict[str, float]:
        """Across-seed mean and standard error of the final-window metrics."""
        finals = self.final_rows()
        stats: dict[str, float] = {}
        for name in ("mean_reward", "min_reward", "delegation_fraction", "central_plan_reward"):
            values = [getattr(r, name) for r in finals if getattr(r, name) is not None]
            if not values:
                continue
            arr = np.asarray(values, dtype=float)
            stats[f"{name}_mean"] = float(arr.mean())
            stats[f"{name}_se"] = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
        return stats

    def to_csv(self) -> str:
        buf = io.StringIO()
        header = "seed,window_start,mean_reward,min_reward,delegation_fraction"
        if self.has_central_plan:
            header += ",central_plan_reward"
        buf.write(header + "\n")
        for row in self.rows:
            cells = [
                str(row.seed),
                str(row.window_start),
                repr(float(row.mean_reward)),
                repr(float(row.min_reward)),
                repr(float(row.delegation_fraction)),
            ]
            if self.has_central_plan:
                cells.append(repr(float(row.central_plan_reward)))
            buf.write(",".join(cells) + "\n")
        return buf.getvalue()


def summarize_trajectory(
    trajectory: Trajectory, window: int, seed: int, central_plan_reward: float | None = None
) -> list[WindowRecord]:
    """Reduce a trajectory to full non-overlapping windows."""
    records = []
    for start in range(0, trajectory.horizon - window + 1, window):
        rewards = trajectory.rewards[start : start + window]
        delegated = trajectory.delegated[start : start + window]
        records.append(
            WindowRecord(
                seed=seed,
                window_start=start,
                mean_reward=float(rewards.mean()),
                min_reward=float(rewards.mean(axis=0).min()),
                delegation_fraction=float(delegated.mean()),
                central_plan_reward=central_plan_reward,
            )
        )
    return records


def _seed_sequences(seed: int) -> tuple[np.random.SeedSequence, np.random.SeedSequence]:
    """One stream for sampling the environment, one for the learners."""
    instance_ss, learning_ss = np.random.SeedSequence(seed).spawn(2)
    return instance_ss, learning_ss


def _run_random_games_seed(config: ExperimentConfig, seed: int) -> list[WindowRecord]:
    instance_ss, learning_ss = _seed_sequences(seed)
    rng = np.random.default_rng(instance_ss)
    counts = (config.actions,) * config.players
    game = Game(counts, rng.random(counts + (config.players,)))
    env = MatrixGameEnv(game, config.mediator)
    trajectory = run_episode(env, config.horizon, learning_ss)
    return summarize_trajectory(trajectory, config.window, seed)


def _run_matching_seed(config: ExperimentConfig, seed: int) -> list[WindowRecord]:
    instance_ss, learning_ss = _seed_sequences(seed)
    instance = generate_matching_instance(config.agents, instance_ss)
    env = MatchingEnv(instance, config.mediator)
    trajectory = run_episode(env, config.horizon, learning_ss)
    return summarize_trajectory(trajectory, config.window, seed)


def _run_restaurant_seed(
    config: ExperimentConfig, seed: int, table: RatingsTable | None, capacities
) -> list[WindowRecord]:
    instance_ss, learning_ss = _seed_sequences(seed)
    instance = generate_instance(
        config.agents,
        config.restaurants,
        config.alpha,
        instance_ss,
        ratings=table,
        capacities=capacities,
    )
    planner_reward = float(central_plan(instance).true_utilities.mean())
    env = RestaurantEnv(instance, config.mediator)
    trajectory = run_episode(env, config.horizon, learning_ss)
    return summarize_trajectory(trajectory, config.window, seed, planner_reward)


def _run_seed(payload) -> list[WindowRecord]:
    config, seed, extra = payload
    if config.scenario == "random-games":
        return _run_random_games_seed(config, seed)
    if config.scenario == "matching":
        return _run_matching_seed(config, seed)
    if config.scenario == "restaurant":
        table, capacities = extra
        return _run_restaurant_seed(config, seed, table, capacities)
    raise ConfigError(f"scenario {config.scenario!r} is not a simulation scenario")


def run_scenario(config: ExperimentConfig) -> RunSummary:
    """Run every seed of a simulation scenario and collect windowed rows."""
    config = config.validated()
    extra = None
    if config.scenario == "restaurant":
        table = RatingsTable.from_csv(config.ratings) if config.ratings else None
        capacities = None
        if config.capacities:
            from .restaurant import load_capacities

            capacities = load_capacities(config.capacities, config.restaurants)
        extra = (table, capacities)
    payloads = [(config, seed, extra) for seed in config.seeds]
    if config.jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            per_seed = list(pool.map(_run_seed, payloads))
    else:
        per_seed = [_run_seed(p) for p in payloads]
    summary = RunSummary(config.scenario, config.mediator, config.window)
    for rows in per_seed:
        summary.rows.extend(rows)
    return summary


def run_random_games(config: ExperimentConfig) -> RunSummary:
    return run_scenario(replace(config, scenario="random-games"))


def run_matching(config: ExperimentConfig) -> RunSummary:
    return run_scenario(replace(config, scenario="matching"))


def run_restaurant(config: ExperimentConfig) -> RunSummary:
    return run_scenario(replace(config, scenario="restaurant"))


def mediated_action_labels(count: int) -> list[str]:
    """Labels 0-, 1-, ..., 0+, 1+, ... for a doubled action space."""
    half = count // 2
    return [f"{a}-" for a in range(half)] + [f"{a}+" for a in range(half)]


def format_mediated_table(game: Game, kind) -> str:
    """Render a 2-player mediated payoff matrix with -/+ action labels."""
    if game.num_players != 2:
        raise ConfigError(
            f"mediated tables are printed for 2-player games, got {game.num_players} players"
        )
    mediated = build_mediated_game(game, kind)
    row_labels = mediated_action_labels(mediated.action_counts[0])
    col_labels = mediated_action_labels(mediated.action_counts[1])
    cells = [
        [
            f"{_fmt(mediated.payoffs[i, j, 0])}, {_fmt(mediated.payoffs[i, j, 1])}"
            for j in range(mediated.action_counts[1])
        ]
        for i in range(mediated.action_counts[0])
    ]
    widths = [
        max(len(col_labels[j]), max(len(cells[i][j]) for i in range(len(cells))))
        for j in range(len(col_labels))
    ]
    label_w = max(len(lbl) for lbl in row_labels)
    lines = [
        " " * label_w
        + "  "
        + "  ".join(col_labels[j].rjust(widths[j]) for j in range(len(col_labels)))
    ]
    for i, row in enumerate(cells):
        lines.append(
            row_labels[i].rjust(label_w)
            + "  "
            + "  ".join(row[j].rjust(widths[j]) for j in range(len(row)))
        )
    return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else f"{x:.3f}"


@dataclass(frozen=True)
class PropositionReport:
    """Outcome of the delegation-dominance and equilibrium-welfare checks."""

    mediator: str
    games_checked: int
    dominance_counterexamples: tuple[str, ...]
    welfare_counterexamples: tuple[str, ...]
    welfare_games_compared: int

    @property
    def passed(self) -> bool:
        return not self.dominance_counterexamples and not self.welfare_counterexamples


def _sample_two_player_game(seed: int, min_actions: int, max_actions: int) -> Game:
    rng = np.random.default_rng(seed)
    counts = tuple(int(c) for c in rng.integers(min_actions, max_actions + 1, size=2))
    return Game(counts, rng.random(counts + (2,)))


def check_delegation_dominance(game: Game, mediated: Game) -> list[str]:
    """For each player, delegating an action must never pay less than playing it."""
    problems = []
    k0, k1 = game.action_counts
    u = mediated.payoffs
    for a in range(k0):
        diff = u[k0 + a, :, 0] - u[a, :, 0]
        if diff.min() < 0:
            against = int(diff.argmin())
            problems.append(
                f"player 0 action {a}: delegating loses {-diff.min():.6f} "
                f"against opponent mediated action {against}"
            )
    for b in range(k1):
        diff = u[:, k1 + b, 1] - u[:, b, 1]
        if diff.min() < 0:
            against = int(diff.argmin())
            problems.append(
                f"player 1 action {b}: delegating loses {-diff.min():.6f} "
                f"against opponent mediated action {against}"
            )
    return problems


def check_equilibrium_welfare(game: Game, mediated: Game) -> tuple[list[str], bool]:
    """Both-delegate equilibria of the mediated game must reach the best original one.

    Returns (problems, compared); compared is False when either side has no
    pure equilibrium to compare.
    """
    original_nash = enumerate_pure_nash(game)
    if not original_nash:
        return [], False
    k0, k1 = game.action_counts
    both_delegate = [
        p for p in enumerate_pure_nash(mediated) if p[0] >= k0 and p[1] >= k1
    ]
    if not both_delegate:
        return [], False
    best_original = max(social_welfare(game, p) for p in original_nash)
    problems = []
    for profile in both_delegate:
        total = social_welfare(mediated, profile)
        if total < best_original:
            problems.append(
                f"mediated equilibrium {profile} has welfare {total:.6f} "
                f"< best original equilibrium welfare {best_original:.6f}"
            )
    return problems, True


def verify_propositions(
    config: ExperimentConfig, min_actions: int = 2, max_actions: int = 4
) -> PropositionReport:
    """Check delegation dominance and equilibrium welfare on random games.

    One 2-player game is sampled per configured seed, with per-player action
    counts drawn from [min_actions, max_actions] and uniform [0, 1) payoffs.
    """
    kind = coerce_kind(config.mediator)
    if kind is MediatorKind.NONE:
        raise ConfigError("verify-props needs a pareto or punish mediator")
    dominance: list[str] = []
    welfare: list[str] = []
    compared = 0
    for seed in config.seeds:
        game = _sample_two_player_game(seed, min_actions, max_actions)
        mediated = build_mediated_game(game, kind)
        for problem in check_delegation_dominance(game, mediated):
            dominance.append(f"seed {seed}: {problem}")
        problems, did_compare = check_equilibrium_welfare(game, mediated)
        compared += did_compare
        for problem in problems:
            welfare.append(f"seed {seed}: {problem}")
    return PropositionReport(
        mediator=kind.value,
        games_checked=len(config.seeds),
        dominance_counterexamples=tuple(dominance),
        welfare_counterexamples=tuple(welfare),
        welfare_games_compared=compared,
    )
