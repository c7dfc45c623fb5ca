"""Finite normal-form games stored as dense payoff tensors.

A game with N players and action counts (k_1, ..., k_N) keeps its payoffs in
a numpy array of shape (k_1, ..., k_N, N): entry [s_1, ..., s_N, i] is player
i's utility at the joint pure profile (s_1, ..., s_N).  C-order iteration over
that tensor is exactly lexicographic order over profiles, which the Nash
enumerator, the mediator solvers, and the text serialization all rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import GameFormatError, GameTooLargeError, InvalidProfileError

# Default cap on the number of cells any exhaustive scan may touch.
DEFAULT_CELL_CAP = 10_000_000

# A pure profile is one action index per player.
PureProfile = tuple[int, ...]


@dataclass(frozen=True)
class Game:
    """Immutable N-player normal-form game."""

    action_counts: tuple[int, ...]
    payoffs: np.ndarray

    def __post_init__(self) -> None:
        counts = tuple(int(c) for c in self.action_counts)
        if not counts or any(c < 1 for c in counts):
            raise ValueError(f"action counts must be positive, got {counts}")
        n = len(counts)
        pay = np.asarray(self.payoffs, dtype=float)
        num_cells = math.prod(counts)
        if pay.shape == (num_cells, n):
            pay = pay.reshape(counts + (n,))
        if pay.shape != counts + (n,):
            raise ValueError(
                f"payoff tensor shape {pay.shape} does not match "
                f"action counts {counts} with {n} players"
            )
        if not np.all(np.isfinite(pay)):
            raise ValueError("payoffs must be finite")
        pay = np.ascontiguousarray(pay)
        pay.flags.writeable = False
        object.__setattr__(self, "action_counts", counts)
        object.__setattr__(self, "payoffs", pay)

    @property
    def num_players(self) -> int:
        return len(self.action_counts)

    @property
    def num_cells(self) -> int:
        return math.prod(self.action_counts)


@dataclass(frozen=True)
class MediatedProfile:
    """Joint submission to a mediator: one action and one delegation bit per player."""

    actions: tuple[int, ...]
    delegate: tuple[bool, ...]

    def __post_init__(self) -> None:
        actions = tuple(int(a) for a in self.actions)
        delegate = tuple(bool(d) for d in self.delegate)
        if len(actions) != len(delegate):
            raise ValueError(
                f"actions ({len(actions)}) and delegate bits ({len(delegate)}) "
                "must have the same length"
            )
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "delegate", delegate)

    @property
    def delegators(self) -> tuple[int, ...]:
        """Indices of players who opted in, derived on demand."""
        return tuple(i for i, d in enumerate(self.delegate) if d)


def check_profile(game: Game, profile: Sequence[int]) -> PureProfile:
    """Validate a profile against a game and return it as a tuple of ints."""
    actions = tuple(int(a) for a in profile)
    if len(actions) != game.num_players:
        raise InvalidProfileError(
            f"profile has {len(actions)} actions for a {game.num_players}-player game"
        )
    for i, (a, k) in enumerate(zip(actions, game.action_counts)):
        if not 0 <= a < k:
            raise InvalidProfileError(
                f"action {a} out of range [0, {k}) for player {i}"
            )
    return actions


def utility(game: Game, profile: Sequence[int]) -> np.ndarray:
    """Payoff vector (one utility per player) at a pure profile."""
    actions = check_profile(game, profile)
    return np.array(game.payoffs[actions])


def social_welfare(game: Game, profile: Sequence[int], subset: Iterable[int] | None = None) -> float:
    """Sum of utilities at a profile over a set of players (all players if None)."""
    u = utility(game, profile)
    if subset is None:
        return float(u.sum())
    players = sorted(set(int(i) for i in subset))
    if players and not (0 <= players[0] and players[-1] < game.num_players):
        raise InvalidProfileError(f"player subset {players} out of range")
    return float(u[players].sum()) if players else 0.0


def pareto_dominates(a: Sequence[float], b: Sequence[float], subset: Iterable[int] | None = None) -> bool:
    """Weak domination: a_i >= b_i for every player i in the subset."""
    av = np.asarray(a, dtype=float)
    bv = np.asarray(b, dtype=float)
    if av.shape != bv.shape:
        raise ValueError(f"outcome vectors differ in shape: {av.shape} vs {bv.shape}")
    if subset is None:
        return bool(np.all(av >= bv))
    players = sorted(set(int(i) for i in subset))
    if players and not (0 <= players[0] and players[-1] < len(av)):
        raise ValueError(f"player subset {players} out of range")
    return bool(np.all(av[players] >= bv[players]))


def enumerate_pure_nash(game: Game, cap: int = DEFAULT_CELL_CAP) -> list[PureProfile]:
    """All pure Nash equilibria, in lexicographic profile order.

    A profile is a pure Nash equilibrium when no player has a strictly
    improving unilateral deviation.  Comparisons are exact; payoffs are
    assumed to be either integers or sampled once from a continuous
    distribution, so ties carry meaning.
    """
    if game.num_cells > cap:
        raise GameTooLargeError(
            f"game has {game.num_cells} cells, above the exhaustive cap {cap}"
        )
    mask = np.ones(game.action_counts, dtype=bool)
    for i in range(game.num_players):
        u_i = game.payoffs[..., i]
        mask &= u_i >= u_i.max(axis=i, keepdims=True)
    return [tuple(int(a) for a in prof) for prof in np.argwhere(mask)]


def build_mediated_game(game: Game, kind, cap: int = DEFAULT_CELL_CAP) -> Game:
    """Explicit mediated game: each player's actions double to (action, delegate bit).

    Mediated action a < k_i means playing a without delegating; a >= k_i means
    submitting a - k_i and delegating.  Every cell's payoff is the original
    game's payoff at the mediator-resolved profile.
    """
    from .mediators import build_mediated_tables

    mediated, _ = build_mediated_tables(game, kind, cap=cap)
    return mediated


def prisoners_dilemma() -> Game:
    """The classic 2x2 dilemma with actions [cooperate, defect]."""
    payoffs = [
        [(2.0, 2.0), (0.0, 3.0)],
        [(3.0, 0.0), (1.0, 1.0)],
    ]
    return Game((2, 2), np.array(payoffs))


def game_to_text(game: Game) -> str:
    """Serialize a game: player count, action counts, then one payoff line per cell.

    Cells appear in lexicographic profile order with one space-separated
    utility per player.
    """
    lines = [str(game.num_players)]
    lines.append(" ".join(str(c) for c in game.action_counts))
    flat = game.payoffs.reshape(game.num_cells, game.num_players)
    for row in flat:
        lines.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def game_from_text(text: str) -> Game:
    """Parse the text format produced by :func:`game_to_text`."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if len(lines) < 2:
        raise GameFormatError("expected at least a player count line and an action count line")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise GameFormatError(f"line 1: cannot parse player count {lines[0]!r}") from exc
    if n < 1:
        raise GameFormatError(f"line 1: player count must be positive, got {n}")
    tokens = lines[1].split()
    if len(tokens) != n:
        raise GameFormatError(f"line 2: expected {n} action counts, got {len(tokens)}")
    try:
        counts = tuple(int(t) for t in tokens)
    except ValueError as exc:
        raise GameFormatError(f"line 2: cannot parse action counts {lines[1]!r}") from exc
    num_cells = math.prod(counts)
    cell_lines = lines[2:]
    if len(cell_lines) != num_cells:
        raise GameFormatError(
            f"expected {num_cells} payoff lines for action counts {counts}, "
            f"got {len(cell_lines)}"
        )
    rows = np.empty((num_cells, n), dtype=float)
    for idx, ln in enumerate(cell_lines):
        parts = ln.split()
        if len(parts) != n:
            raise GameFormatError(
                f"payoff line {idx + 3}: expected {n} utilities, got {len(parts)}"
            )
        try:
            rows[idx] = [float(p) for p in parts]
        except ValueError as exc:
            raise GameFormatError(f"payoff line {idx + 3}: cannot parse {ln!r}") from exc
    return Game(counts, rows)


def save_game(game: Game, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(game_to_text(game))


def load_game(path) -> Game:
    with open(path, "r", encoding="utf-8") as fh:
        return game_from_text(fh.read())
