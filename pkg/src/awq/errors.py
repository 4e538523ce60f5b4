"""Exception hierarchy shared by all modules."""


class AWQError(ValueError):
    """Base class for every error raised by this package."""


class InvalidInputError(AWQError):
    """A scalar argument is not finite, or a parameter is out of range."""


class DomainError(AWQError):
    """An argument lies outside the domain where the formula is valid."""


class SingularityError(AWQError):
    """A divided difference was requested where z - 1/z vanishes."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class ConvergenceError(AWQError):
    """A non-terminating series failed to converge within the term budget."""


class PoleError(AWQError):
    """A denominator Pochhammer symbol vanished before the series terminated."""


class ParameterRoleError(AWQError):
    """A formula that singles out the parameter ``a`` was called with a = 0."""


class ConditioningError(AWQError):
    """A triangular change of basis is too ill-conditioned to trust."""
