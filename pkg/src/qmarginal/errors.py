"""Exception types shared across the package."""


class QmarginalError(Exception):
    """Base class for package-specific errors."""


class InvalidInputError(QmarginalError, ValueError):
    """Malformed or inconsistent user input."""


class ResourceCapError(QmarginalError, RuntimeError):
    """A configured size cap would be exceeded."""


class SolverConvergenceError(QmarginalError, RuntimeError):
    """An iterative solver stopped without a conclusive answer."""


class InternalConsistencyError(QmarginalError, AssertionError):
    """Two independent computations of the same quantity disagree."""


class UnsupportedFeatureError(QmarginalError, NotImplementedError):
    """A request outside the supported problem class."""
