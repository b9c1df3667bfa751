"""Exception types shared across the package."""


class NeuronLabError(Exception):
    """Base class for all package-specific errors."""


class InvalidConventionError(NeuronLabError, ValueError):
    """A subderivative value at a kink lies outside the admissible range."""


class DimensionMismatchError(NeuronLabError, ValueError):
    """Vector lengths or declared dimensions disagree."""


class DegenerateSubspaceError(NeuronLabError, ValueError):
    """Two vectors expected to span a plane are (numerically) parallel."""


class UnsupportedDistributionError(NeuronLabError, TypeError):
    """An exact/closed-form operation was called on a distribution it does not cover."""


class UndefinedAngleError(NeuronLabError, ValueError):
    """The angle to the target is undefined because the vector is zero."""


class NotApplicableError(NeuronLabError, RuntimeError):
    """A theorem checker was invoked outside the theorem's hypotheses."""


class ConfigError(NeuronLabError, ValueError):
    """An experiment configuration key or value could not be resolved."""


class IntegrationFailure(NeuronLabError, RuntimeError):
    """Adaptive ODE integration failed; carries the partial trajectory."""

    def __init__(self, message, partial_trajectory=None):
        super().__init__(message)
        self.partial_trajectory = partial_trajectory
