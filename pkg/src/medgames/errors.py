"""Exception types shared across the package."""


class MedgamesError(Exception):
    """Base class for all package errors."""


class InvalidProfileError(MedgamesError):
    """A pure or mediated profile does not fit the game it was used with."""


class InvalidActionError(MedgamesError):
    """An action is outside the rules of the environment (e.g. self-matching)."""


class GameTooLargeError(MedgamesError):
    """An exhaustive operation was asked to scan more cells than the cap allows."""


class InfeasibleAssignmentError(MedgamesError):
    """No feasible assignment exists for at least one agent."""


class GameFormatError(MedgamesError):
    """A serialized game file is malformed."""


class RatingsFormatError(MedgamesError):
    """A ratings CSV file is malformed."""


class ConfigError(MedgamesError):
    """An experiment configuration is inconsistent or incomplete."""
