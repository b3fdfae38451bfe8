"""Exception hierarchy shared by every gresilience module."""


class GresilienceError(Exception):
    """Base class for all errors raised by the package."""


class ValidationError(GresilienceError, ValueError):
    """Invalid input structure or field value.

    ``path`` carries a dotted field path when the error originates in a
    nested configuration object.
    """

    def __init__(self, message: str, path: str | None = None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class DomainError(GresilienceError, ValueError):
    """A numeric argument lies outside its mathematical domain."""


class DegenerateGameError(GresilienceError, ArithmeticError):
    """Mixed equilibrium undefined because an indifference denominator is zero."""


class InvariantError(GresilienceError, RuntimeError):
    """An internal invariant was breached. Always a bug, never user error."""


class IntegrityError(GresilienceError, ValueError):
    """An event log is malformed (e.g. timestamps out of order)."""
