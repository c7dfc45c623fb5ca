"""Mediated normal-form games: exact mediator solvers and learning dynamics."""

from .assignment import FORBIDDEN, Assignment, AssignmentProblem, solve_assignment
from .errors import (
    ConfigError,
    GameFormatError,
    GameTooLargeError,
    InfeasibleAssignmentError,
    InvalidActionError,
    InvalidProfileError,
    MedgamesError,
    RatingsFormatError,
)
from .games import (
    DEFAULT_CELL_CAP,
    Game,
    MediatedProfile,
    PureProfile,
    build_mediated_game,
    enumerate_pure_nash,
    game_from_text,
    game_to_text,
    load_game,
    pareto_dominates,
    prisoners_dilemma,
    save_game,
    social_welfare,
    utility,
)
from .learning import LearnerState, MatrixGameEnv, Trajectory, run_episode
from .matching import (
    MatchingEnv,
    MatchingInstance,
    generate_matching_instance,
    pareto_mediate_matching,
    punish_mediate_matching,
)
from .mediators import (
    MediatorKind,
    MediatorOutcome,
    build_mediated_tables,
    pareto_mediate,
    punish_mediate,
    resolve,
)
from .restaurant import (
    RatingsTable,
    RestaurantEnv,
    RestaurantInstance,
    SeatingResult,
    central_plan,
    generate_instance,
    pareto_mediate_restaurant,
    predict_ratings,
    punish_mediate_restaurant,
    realized_utility,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
