"""Exception types shared across the package."""


class SqfnError(Exception):
    """Base class for all errors raised by sqfnlab."""


class OutOfDomain(SqfnError, ValueError):
    pass


class BadParameter(SqfnError, ValueError):
    pass


class ScaleTooFine(SqfnError, ValueError):
    """A scale parameter is below twice the sampling step of a grid function."""


class PreconditionError(SqfnError, ValueError):
    pass


class NoConvergence(SqfnError, RuntimeError):
    """Quadrature refinement ran out of levels before meeting its tolerance.

    The best available estimate is kept in ``value`` so callers can still
    record it with a flag.
    """

    def __init__(self, message, value=float("nan")):
        super().__init__(message)
        self.value = value
