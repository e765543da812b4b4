"""Exception types raised by the library.

Each type carries the process exit code the command line maps it to.
"""


class WalkError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class UsageError(WalkError, ValueError):
    """Inputs violate a documented precondition (ordering, missing data)."""

    exit_code = 2


class NormalizationError(UsageError):
    """A state or distribution does not sum to one."""


class ShapeError(UsageError):
    """Two lattice windows that must coincide do not."""


class NoCorrespondenceError(UsageError):
    """Kicked-rotor parameters have no matching coin angle."""


class ConsistencyError(WalkError):
    """Interference data is inconsistent with the distribution it augments."""

    exit_code = 4


class DivergenceError(WalkError, ZeroDivisionError):
    """A quantity diverges at the requested (trivial) coin angle."""

    exit_code = 2


class ConvergenceError(WalkError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""

    exit_code = 4


class TrivialAngleWarning(UserWarning):
    """The coin angle is 0 or pi/2, where the walk is a pure translation."""
