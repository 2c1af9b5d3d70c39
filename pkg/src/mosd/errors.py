"""Exception hierarchy shared by all modules."""


class MosdError(Exception):
    """Base class for errors raised by this package."""


class InvalidInputError(MosdError, ValueError):
    """Malformed arguments: wrong shapes, non-finite entries, bad parameters."""


class DomainError(MosdError, ValueError):
    """A point lies outside the domain of a problem."""


class UnsupportedError(InvalidInputError):
    """Request is well-formed but deliberately not supported (size guards)."""


class NotConvergedError(MosdError, RuntimeError):
    """The min-norm dual solver did not certify its answer."""


class LinesearchFailedError(MosdError, RuntimeError):
    """No admissible Armijo step was found within the backtracking budget."""
