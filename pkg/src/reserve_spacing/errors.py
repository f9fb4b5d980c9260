"""Exception hierarchy shared by the analytic, simulation and CLI layers."""


class ReserveSpacingError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(ReserveSpacingError, ValueError):
    """A model parameter, distance, matrix or distribution is out of bounds."""


class StructureError(ReserveSpacingError, ValueError):
    """A transition matrix lacks the structure an analysis requires."""


class DegenerateEigenvectorError(ReserveSpacingError, ArithmeticError):
    """The transient block is identically zero, so no eigenvector exists."""


class IrreducibilityError(ReserveSpacingError, ValueError):
    """Stationary analysis requested for a chain with an absorbing empty state."""


class IncompatibleObjectiveError(ReserveSpacingError, ValueError):
    """Objective kind does not apply to the chosen variant/parameters."""


class ConfigError(ReserveSpacingError, ValueError):
    """Malformed or invalid CLI configuration."""
