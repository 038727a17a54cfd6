"""Exception types shared across the package."""


class LpcharError(ValueError):
    """Base class for all input/evaluation errors raised by lpchar."""


class ValidationError(LpcharError):
    """Malformed input: negative weights, mismatched spaces, bad weight sums."""


class SizeError(LpcharError):
    """A product space would exceed the atom limit."""


class DomainError(LpcharError):
    """Generator evaluated outside its domain."""


class RangeError(LpcharError):
    """Generator inverse requested outside the generator's range."""


class DegenerateInputError(LpcharError):
    """Input is identically zero (or otherwise degenerate) where that is excluded."""


class PreconditionError(LpcharError):
    """An operation's stated precondition does not hold."""
