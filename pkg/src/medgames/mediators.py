"""Exact exhaustive solvers for the Pareto and Punishing mediators.

Both mediators take a joint submission (every player's action plus a
delegation bit) and output a resolved pure profile of the original game.
Non-delegators are never moved.  The Pareto mediator reassigns delegators to
maximize their combined utility subject to none of them ending up below the
utility of the fully-submitted profile; it stands down unless at least two
players delegate.  The Punishing mediator maximizes everyone's combined
utility when all players delegate, and otherwise moves the delegators to
minimize the non-delegators' combined utility.

Tie-breaking is deterministic: the submitted profile wins whenever it attains
the optimum, otherwise the lexicographically smallest optimal reassignment of
the delegators' actions is chosen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError, GameTooLargeError
from .games import DEFAULT_CELL_CAP, Game, MediatedProfile, PureProfile, check_profile


class MediatorKind(str, Enum):
    NONE = "none"
    PARETO = "pareto"
    PUNISH = "punish"


@dataclass(frozen=True)
class MediatorOutcome:
    """Resolved profile plus diagnostics about the solve."""

    resolved: PureProfile
    activated: bool
    num_optima: int


def coerce_kind(kind) -> MediatorKind:
    try:
        return MediatorKind(kind)
    except ValueError:
        raise ConfigError(
            f"unknown mediator kind {kind!r}; expected one of "
            f"{[k.value for k in MediatorKind]}"
        ) from None


def _check_submission(game: Game, sm: MediatedProfile) -> PureProfile:
    actions = check_profile(game, sm.actions)
    if len(sm.delegate) != game.num_players:
        raise ValueError(
            f"submission has {len(sm.delegate)} delegate bits for a "
            f"{game.num_players}-player game"
        )
    return actions


def _delegator_slice(game: Game, actions: PureProfile, delegators: tuple[int, ...]) -> np.ndarray:
    """Payoff tensor with non-delegators pinned to their submitted actions.

    The remaining axes are the delegators' action spaces in ascending player
    order, so C-order argmax/argmin over the result picks the lexicographically
    smallest optimal reassignment.
    """
    dset = set(delegators)
    index = tuple(slice(None) if i in dset else actions[i] for i in range(game.num_players))
    return game.payoffs[index]


def _resolve_from_coords(actions: PureProfile, delegators: tuple[int, ...], coords) -> PureProfile:
    resolved = list(actions)
    for player, a in zip(delegators, coords):
        resolved[player] = int(a)
    return tuple(resolved)


def pareto_mediate(game: Game, sm: MediatedProfile, cap: int = DEFAULT_CELL_CAP) -> MediatorOutcome:
    """Maximize delegator welfare without leaving any delegator worse off.

    With fewer than two delegators the submission is returned unchanged.
    Otherwise every joint reassignment of the delegators' actions is scanned:
    feasible candidates give each delegator at least their utility under the
    fully-submitted profile, and among those the candidate with the highest
    delegator welfare wins.  The submitted profile is always feasible, so a
    solution always exists.
    """
    actions = _check_submission(game, sm)
    delegators = sm.delegators
    if len(delegators) < 2:
        return MediatorOutcome(actions, False, 1)
    if game.num_cells > cap:
        raise GameTooLargeError(
            f"game has {game.num_cells} cells, above the exhaustive cap {cap}"
        )
    dlist = list(delegators)
    sub = _delegator_slice(game, actions, delegators)
    sub_d = sub[..., dlist]
    submitted_u = game.payoffs[actions][dlist]
    feasible = np.all(sub_d >= submitted_u, axis=-1)
    welfare = sub_d.sum(axis=-1)
    masked = np.where(feasible, welfare, -np.inf)
    best = masked.max()
    num_optima = int((masked == best).sum())
    submitted_coords = tuple(actions[i] for i in delegators)
    if masked[submitted_coords] == best:
        return MediatorOutcome(actions, False, num_optima)
    coords = np.unravel_index(int(masked.argmax()), masked.shape)
    return MediatorOutcome(_resolve_from_coords(actions, delegators, coords), True, num_optima)


def punish_mediate(game: Game, sm: MediatedProfile, cap: int = DEFAULT_CELL_CAP) -> MediatorOutcome:
    """Reward full delegation, punish partial delegation.

    When everyone delegates, the profile maximizing total welfare over the
    whole game is played.  When some but not all players delegate, the
    delegators' actions are reassigned to minimize the non-delegators'
    combined utility (non-delegators stay pinned).  With no delegators the
    submission is returned unchanged.
    """
    actions = _check_submission(game, sm)
    delegators = sm.delegators
    n = game.num_players
    if not delegators:
        return MediatorOutcome(actions, False, 1)
    if game.num_cells > cap:
        raise GameTooLargeError(
            f"game has {game.num_cells} cells, above the exhaustive cap {cap}"
        )
    if len(delegators) == n:
        objective = game.payoffs.sum(axis=-1)
        best = objective.max()
        num_optima = int((objective == best).sum())
        if objective[actions] == best:
            return MediatorOutcome(actions, False, num_optima)
        coords = np.unravel_index(int(objective.argmax()), objective.shape)
        return MediatorOutcome(tuple(int(a) for a in coords), True, num_optima)
    others = [i for i in range(n) if i not in set(delegators)]
    sub = _delegator_slice(game, actions, delegators)
    objective = sub[..., others].sum(axis=-1)
    best = objective.min()
    num_optima = int((objective == best).sum())
    submitted_coords = tuple(actions[i] for i in delegators)
    if objective[submitted_coords] == best:
        return MediatorOutcome(actions, False, num_optima)
    coords = np.unravel_index(int(objective.argmin()), objective.shape)
    return MediatorOutcome(_resolve_from_coords(actions, delegators, coords), True, num_optima)


def resolve(game: Game, sm: MediatedProfile, kind, cap: int = DEFAULT_CELL_CAP) -> MediatorOutcome:
    """Dispatch a submission to the requested mediator (identity for 'none')."""
    kind = coerce_kind(kind)
    if kind is MediatorKind.NONE:
        return MediatorOutcome(_check_submission(game, sm), False, 1)
    if kind is MediatorKind.PARETO:
        return pareto_mediate(game, sm, cap=cap)
    return punish_mediate(game, sm, cap=cap)


def mediated_profile_from_index(game: Game, mediated_actions) -> MediatedProfile:
    """Decode a mediated-game cell index into (original action, delegate bit) pairs."""
    actions = []
    delegate = []
    for i, m in enumerate(mediated_actions):
        k = game.action_counts[i]
        m = int(m)
        if not 0 <= m < 2 * k:
            raise ValueError(f"mediated action {m} out of range [0, {2 * k}) for player {i}")
        actions.append(m - k if m >= k else m)
        delegate.append(m >= k)
    return MediatedProfile(tuple(actions), tuple(delegate))


def build_mediated_tables(game: Game, kind, cap: int = DEFAULT_CELL_CAP) -> tuple[Game, np.ndarray]:
    """Mediated game plus the table of resolved original profiles per cell."""
    kind = coerce_kind(kind)
    mediated_counts = tuple(2 * k for k in game.action_counts)
    if math.prod(mediated_counts) > cap:
        raise GameTooLargeError(
            f"mediated game would have {math.prod(mediated_counts)} cells, "
            f"above the exhaustive cap {cap}"
        )
    n = game.num_players
    payoffs = np.empty(mediated_counts + (n,), dtype=float)
    resolved_table = np.empty(mediated_counts + (n,), dtype=np.int64)
    for cell in np.ndindex(*mediated_counts):
        sm = mediated_profile_from_index(game, cell)
        outcome = resolve(game, sm, kind, cap=cap)
        payoffs[cell] = game.payoffs[outcome.resolved]
        resolved_table[cell] = outcome.resolved
    return Game(mediated_counts, payoffs), resolved_table
