"""Restaurant reservation game with congestion and platform-side mediation.

Every agent books one restaurant per round.  An agent's full utility for
restaurant r is ``predicted[i][r] + alpha * private[i][r]``: the predicted
part is what the platform knows (from ratings), the private part is the
agent's own taste, and alpha weighs how much of the value the platform cannot
see.  When a restaurant's bookings exceed its capacity, every booker's
utility is scaled by capacity/occupancy (the chance of actually getting a
table).

Both mediators and the central planner see only predicted utilities.  The
Pareto mediator frees all delegators' seats, builds one slot per unit of
remaining capacity, forbids any slot that would drop a delegator below the
predicted value of their own submitted choice, adds a personal stay-put slot
per delegator so the problem is always feasible, and solves the resulting
max-weight assignment.  The Punishing mediator crowds all delegators into
the restaurant of some non-delegator (the one whose choice hurts the
non-delegators most), unless everyone delegates, in which case it assigns
everyone like the central planner would.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .assignment import FORBIDDEN, AssignmentProblem, solve_assignment
from .errors import ConfigError, InfeasibleAssignmentError, InvalidActionError, RatingsFormatError
from .games import MediatedProfile
from .mediators import MediatorKind, coerce_kind


@dataclass(frozen=True)
class RestaurantInstance:
    """Capacities plus predicted and private utility matrices."""

    capacities: np.ndarray   # (R,) positive ints
    predicted: np.ndarray    # (P, R) platform-visible utility, [0, 1) scale
    private: np.ndarray      # (P, R) agent-only utility, [0, 1)
    alpha: float

    def __post_init__(self) -> None:
        caps = np.asarray(self.capacities, dtype=np.int64)
        pred = np.asarray(self.predicted, dtype=float)
        priv = np.asarray(self.private, dtype=float)
        if caps.ndim != 1 or np.any(caps < 1):
            raise ValueError("capacities must be a vector of positive integers")
        if pred.ndim != 2 or pred.shape != priv.shape or pred.shape[1] != len(caps):
            raise ValueError(
                f"utility matrices must both be (agents, {len(caps)}), got "
                f"{pred.shape} and {priv.shape}"
            )
        if self.alpha < 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")
        true = pred + self.alpha * priv
        for arr in (caps, pred, priv, true):
            arr.flags.writeable = False
        object.__setattr__(self, "capacities", caps)
        object.__setattr__(self, "predicted", pred)
        object.__setattr__(self, "private", priv)
        object.__setattr__(self, "_true", true)

    @property
    def num_agents(self) -> int:
        return self.predicted.shape[0]

    @property
    def num_restaurants(self) -> int:
        return len(self.capacities)

    @property
    def true_utilities(self) -> np.ndarray:
        """predicted + alpha * private, the utility agents actually experience."""
        return self._true


@dataclass(frozen=True)
class SeatingResult:
    """Resolved bookings plus realized utilities under the congestion rule."""

    choices: np.ndarray
    occupancy: np.ndarray
    true_utilities: np.ndarray
    predicted_utilities: np.ndarray


def _check_choices(instance: RestaurantInstance, choices) -> np.ndarray:
    c = np.asarray(choices, dtype=np.int64)
    if c.shape != (instance.num_agents,):
        raise InvalidActionError(
            f"expected {instance.num_agents} choices, got shape {c.shape}"
        )
    if np.any((c < 0) | (c >= instance.num_restaurants)):
        raise InvalidActionError("restaurant index out of range")
    return c


def realized_utility(instance: RestaurantInstance, choices) -> tuple[np.ndarray, np.ndarray]:
    """(true, predicted) utility per agent after congestion scaling."""
    c = _check_choices(instance, choices)
    occupancy = np.bincount(c, minlength=instance.num_restaurants)
    factor = np.minimum(1.0, instance.capacities[c] / occupancy[c])
    agents = np.arange(instance.num_agents)
    return factor * instance.true_utilities[agents, c], factor * instance.predicted[agents, c]


def seat(instance: RestaurantInstance, choices) -> SeatingResult:
    c = _check_choices(instance, choices)
    true_u, pred_u = realized_utility(instance, c)
    occupancy = np.bincount(c, minlength=instance.num_restaurants)
    return SeatingResult(c, occupancy, true_u, pred_u)


def _capacity_slots(capacities: np.ndarray) -> np.ndarray:
    """One slot per unit of capacity, labeled with its restaurant index."""
    return np.repeat(np.arange(len(capacities)), np.maximum(capacities, 0))


def _solve_seating(
    instance: RestaurantInstance,
    choices: np.ndarray,
    movers: np.ndarray,
    slot_restaurants: np.ndarray,
    constrain: bool,
) -> np.ndarray:
    """Assign the movers to capacity slots (or their personal stay-put slot).

    Weights are predicted utilities; with ``constrain`` every slot paying
    less than the mover's own submitted choice is forbidden.  Stay-put slots
    guarantee feasibility and leave the submitted choice in place.
    """
    d = len(movers)
    num_slots = len(slot_restaurants)
    baseline = instance.predicted[movers, choices[movers]]
    table_w = instance.predicted[movers][:, slot_restaurants]
    if constrain:
        table_w = np.where(table_w >= baseline[:, None], table_w, FORBIDDEN)
    weights = np.full((d, num_slots + d), FORBIDDEN)
    weights[:, :num_slots] = table_w
    weights[np.arange(d), num_slots + np.arange(d)] = baseline
    assignment = solve_assignment(AssignmentProblem(weights))
    resolved = choices.copy()
    for idx, slot in enumerate(assignment.slot_of):
        if slot < num_slots:
            resolved[movers[idx]] = slot_restaurants[slot]
    return resolved


def pareto_mediate_restaurant(instance: RestaurantInstance, sm: MediatedProfile) -> SeatingResult:
    """Reseat delegators to maximize predicted welfare, never below their pick.

    Activates only with two or more delegators.  All delegators' submitted
    seats are freed before residual capacity is computed; a delegator whose
    stay-put slot wins simply keeps their submitted choice.  Realized
    utilities always use the full (true) utility and the congestion rule.
    """
    choices = _check_choices(instance, sm.actions)
    delegate = np.asarray(sm.delegate, dtype=bool)
    movers = np.flatnonzero(delegate)
    if len(movers) < 2:
        return seat(instance, choices)
    nd_occupancy = np.bincount(choices[~delegate], minlength=instance.num_restaurants)
    residual = np.maximum(instance.capacities - nd_occupancy, 0)
    slots = _capacity_slots(residual)
    resolved = _solve_seating(instance, choices, movers, slots, constrain=True)
    return seat(instance, resolved)


def punish_mediate_restaurant(instance: RestaurantInstance, sm: MediatedProfile) -> SeatingResult:
    """Crowd delegators onto a non-delegator's restaurant, or plan for everyone.

    With full delegation this is the unconstrained predicted-welfare
    assignment (stay-put slots kept for feasibility).  Otherwise all
    delegators are sent to the restaurant, among those picked by
    non-delegators, that minimizes the non-delegators' total predicted
    realized utility after the crowding; ties go to the lowest index.
    """
    choices = _check_choices(instance, sm.actions)
    delegate = np.asarray(sm.delegate, dtype=bool)
    movers = np.flatnonzero(delegate)
    if len(movers) == 0:
        return seat(instance, choices)
    if len(movers) == instance.num_agents:
        slots = _capacity_slots(instance.capacities)
        resolved = _solve_seating(instance, choices, movers, slots, constrain=False)
        return seat(instance, resolved)
    outsiders = np.flatnonzero(~delegate)
    outsider_choices = choices[outsiders]
    candidates = np.unique(outsider_choices)
    nd_occupancy = np.bincount(outsider_choices, minlength=instance.num_restaurants)
    base_pred = instance.predicted[outsiders, outsider_choices]
    occ = nd_occupancy[outsider_choices][None, :] + len(movers) * (
        outsider_choices[None, :] == candidates[:, None]
    )
    factors = np.minimum(1.0, instance.capacities[outsider_choices][None, :] / occ)
    totals = (factors * base_pred[None, :]).sum(axis=1)
    target = int(candidates[int(np.argmin(totals))])
    resolved = choices.copy()
    resolved[movers] = target
    return seat(instance, resolved)


def central_plan(instance: RestaurantInstance) -> SeatingResult:
    """Assign every agent by predicted utility alone, ignoring private tastes."""
    slots = _capacity_slots(instance.capacities)
    if len(slots) < instance.num_agents:
        raise InfeasibleAssignmentError(
            f"total capacity {len(slots)} cannot seat {instance.num_agents} agents"
        )
    weights = instance.predicted[:, slots]
    assignment = solve_assignment(AssignmentProblem(weights))
    choices = slots[list(assignment.slot_of)]
    return seat(instance, choices)


@dataclass(frozen=True)
class RatingsTable:
    """Sparse (user, restaurant, rating) triples on dense contiguous indices."""

    num_users: int
    num_restaurants: int
    users: np.ndarray
    restaurants: np.ndarray
    ratings: np.ndarray

    def __post_init__(self) -> None:
        u = np.asarray(self.users, dtype=np.int64)
        m = np.asarray(self.restaurants, dtype=np.int64)
        r = np.asarray(self.ratings, dtype=float)
        if not (len(u) == len(m) == len(r)):
            raise ValueError("users, restaurants and ratings must have equal length")
        if len(u) and (u.min() < 0 or u.max() >= self.num_users):
            raise ValueError("user index out of range")
        if len(m) and (m.min() < 0 or m.max() >= self.num_restaurants):
            raise ValueError("restaurant index out of range")
        if len(r) and (r.min() < 1.0 or r.max() > 5.0):
            raise ValueError("ratings must lie in [1, 5]")
        if len(set(zip(u.tolist(), m.tolist()))) != len(u):
            raise ValueError("at most one rating per (user, restaurant) pair")
        object.__setattr__(self, "users", u)
        object.__setattr__(self, "restaurants", m)
        object.__setattr__(self, "ratings", r)

    @classmethod
    def from_csv(cls, path, min_ratings_per_user: int = 5) -> "RatingsTable":
        """Load `user_id,restaurant_id,rating` rows.

        Duplicate (user, restaurant) pairs are rejected with their line
        numbers; users with fewer than ``min_ratings_per_user`` rows are
        dropped; surviving ids are remapped to dense indices in sorted order.
        """
        rows: list[tuple[str, str, float]] = []
        seen: dict[tuple[str, str], int] = {}
        duplicates: list[int] = []
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["user_id", "restaurant_id", "rating"]:
                raise RatingsFormatError(
                    f"{path}: expected header 'user_id,restaurant_id,rating', got {header}"
                )
            for lineno, row in enumerate(reader, start=2):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                if len(row) != 3:
                    raise RatingsFormatError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
                user, rest, rating_str = (cell.strip() for cell in row)
                try:
                    rating = float(rating_str)
                except ValueError:
                    raise RatingsFormatError(
                        f"{path}:{lineno}: cannot parse rating {rating_str!r}"
                    ) from None
                if not 1.0 <= rating <= 5.0:
                    raise RatingsFormatError(
                        f"{path}:{lineno}: rating {rating} outside [1, 5]"
                    )
                key = (user, rest)
                if key in seen:
                    duplicates.append(lineno)
                else:
                    seen[key] = lineno
                    rows.append((user, rest, rating))
        if duplicates:
            raise RatingsFormatError(
                f"{path}: duplicate (user, restaurant) pairs on lines "
                + ", ".join(str(n) for n in duplicates)
            )
        counts: dict[str, int] = {}
        for user, _, _ in rows:
            counts[user] = counts.get(user, 0) + 1
        rows = [row for row in rows if counts[row[0]] >= min_ratings_per_user]
        if not rows:
            raise RatingsFormatError(
                f"{path}: no users with at least {min_ratings_per_user} ratings"
            )
        user_ids = sorted({row[0] for row in rows})
        rest_ids = sorted({row[1] for row in rows})
        user_index = {uid: i for i, uid in enumerate(user_ids)}
        rest_index = {rid: i for i, rid in enumerate(rest_ids)}
        return cls(
            num_users=len(user_ids),
            num_restaurants=len(rest_ids),
            users=np.array([user_index[row[0]] for row in rows]),
            restaurants=np.array([rest_index[row[1]] for row in rows]),
            ratings=np.array([row[2] for row in rows]),
        )


def load_capacities(path, num_restaurants: int) -> np.ndarray:
    """Optional `restaurant_id,capacity` file; ids must be dense indices."""
    caps = np.zeros(num_restaurants, dtype=np.int64)
    seen = np.zeros(num_restaurants, dtype=bool)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["restaurant_id", "capacity"]:
            raise RatingsFormatError(
                f"{path}: expected header 'restaurant_id,capacity', got {header}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise RatingsFormatError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                rid = int(row[0])
                cap = int(row[1])
            except ValueError:
                raise RatingsFormatError(f"{path}:{lineno}: cannot parse {row!r}") from None
            if not 0 <= rid < num_restaurants:
                raise RatingsFormatError(f"{path}:{lineno}: restaurant id {rid} out of range")
            if cap < 1:
                raise RatingsFormatError(f"{path}:{lineno}: capacity must be positive")
            if seen[rid]:
                raise RatingsFormatError(f"{path}:{lineno}: duplicate restaurant id {rid}")
            seen[rid] = True
            caps[rid] = cap
    if not seen.all():
        missing = int(np.flatnonzero(~seen)[0])
        raise RatingsFormatError(f"{path}: missing capacity for restaurant {missing}")
    return caps


def predict_ratings(table: RatingsTable, k: int = 20) -> np.ndarray:
    """Fill the full user x restaurant utility matrix from sparse ratings.

    Observed ratings pass straight through.  Missing entries use user-based
    k-nearest-neighbor prediction: cosine similarity on mean-centered rating
    vectors, a similarity-weighted average of neighbor deviations added to
    the user's own mean.  Entries no neighbor can vouch for fall back to the
    restaurant's mean rating, then to the global mean.  Everything is
    rescaled from the [1, 5] rating scale to [0, 1].
    """
    if len(table.ratings) == 0:
        raise ValueError("cannot predict from an empty ratings table")
    num_users, num_items = table.num_users, table.num_restaurants
    matrix = np.zeros((num_users, num_items))
    observed = np.zeros((num_users, num_items), dtype=bool)
    matrix[table.users, table.restaurants] = table.ratings
    observed[table.users, table.restaurants] = True

    global_mean = float(table.ratings.mean())
    user_counts = observed.sum(axis=1)
    user_sum = matrix.sum(axis=1)
    user_mean = np.where(user_counts > 0, user_sum / np.maximum(user_counts, 1), global_mean)
    centered = np.where(observed, matrix - user_mean[:, None], 0.0)

    norms = np.linalg.norm(centered, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        sim = (centered @ centered.T) / np.outer(norms, norms)
    sim[~np.isfinite(sim)] = 0.0
    ranking = sim.copy()
    np.fill_diagonal(ranking, -np.inf)

    k_eff = min(k, num_users - 1)
    prediction = np.empty((num_users, num_items))
    item_counts = observed.sum(axis=0)
    item_mean = np.where(
        item_counts > 0, matrix.sum(axis=0) / np.maximum(item_counts, 1), global_mean
    )
    prediction[:] = item_mean[None, :]
    if k_eff > 0:
        neighbor_cols = np.argsort(-ranking, axis=1, kind="stable")[:, :k_eff]
        rows = np.repeat(np.arange(num_users), k_eff)
        weights = np.zeros((num_users, num_users))
        weights[rows, neighbor_cols.ravel()] = sim[rows, neighbor_cols.ravel()]
        numerator = weights @ centered
        denominator = np.abs(weights) @ observed.astype(float)
        knn = user_mean[:, None] + np.divide(
            numerator, denominator, out=np.zeros_like(numerator), where=denominator > 0
        )
        prediction = np.where(denominator > 0, knn, prediction)
    prediction = np.where(observed, matrix, np.clip(prediction, 1.0, 5.0))
    return (prediction - 1.0) / 4.0


def generate_instance(
    num_agents: int,
    num_restaurants: int,
    alpha: float,
    seed,
    ratings: RatingsTable | None = None,
    capacities: np.ndarray | None = None,
) -> RestaurantInstance:
    """Random instance: capacities uniform on {1..10}, utilities uniform [0, 1).

    When a ratings table is supplied, predicted utilities come from the
    recommender instead (the first ``num_agents`` users and
    ``num_restaurants`` restaurants of the dense remap).
    """
    if num_agents < 1 or num_restaurants < 1:
        raise ConfigError("agent and restaurant counts must be positive")
    rng = np.random.default_rng(seed)
    if capacities is None:
        capacities = rng.integers(1, 11, size=num_restaurants)
    private = rng.random((num_agents, num_restaurants))
    if ratings is None:
        predicted = rng.random((num_agents, num_restaurants))
    else:
        if ratings.num_users < num_agents or ratings.num_restaurants < num_restaurants:
            raise ConfigError(
                f"ratings table covers {ratings.num_users} users x "
                f"{ratings.num_restaurants} restaurants, need at least "
                f"{num_agents} x {num_restaurants}"
            )
        predicted = predict_ratings(ratings)[:num_agents, :num_restaurants]
    return RestaurantInstance(capacities, predicted, private, alpha)


class RestaurantEnv:
    """Restaurant game as a mediated bandit environment."""

    def __init__(self, instance: RestaurantInstance, kind=MediatorKind.NONE) -> None:
        self.instance = instance
        self.kind = coerce_kind(kind)
        self.num_agents = instance.num_agents
        per_agent = instance.num_restaurants
        if self.kind is not MediatorKind.NONE:
            per_agent *= 2
        self.arm_counts = (per_agent,) * self.num_agents

    def step(self, arms):
        r = self.instance.num_restaurants
        arms = np.asarray(arms, dtype=np.int64)
        if self.kind is MediatorKind.NONE:
            delegated = np.zeros(self.num_agents, dtype=bool)
            seating = seat(self.instance, arms)
        else:
            delegated = arms >= r
            choices = np.where(delegated, arms - r, arms)
            sm = MediatedProfile(tuple(int(c) for c in choices), tuple(bool(d) for d in delegated))
            if self.kind is MediatorKind.PARETO:
                seating = pareto_mediate_restaurant(self.instance, sm)
            else:
                seating = punish_mediate_restaurant(self.instance, sm)
        return seating.true_utilities, delegated, seating.choices
