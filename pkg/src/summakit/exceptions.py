"""Exception types shared by all summakit modules."""


class SummakitError(Exception):
    """Base class for every error raised by this package."""


class ParameterDomainError(SummakitError, ValueError):
    """A parameter lies outside its mathematical domain, e.g. p not in (0, 1)."""


class PreconditionError(SummakitError, ValueError):
    """An operation-specific precondition does not hold for the given inputs."""


class HorizonError(SummakitError, IndexError):
    """A requested index range exceeds what a sequence or vector can provide."""


class MatrixValidationError(SummakitError, ValueError):
    """A matrix fails row-stochasticity validation."""


class ConvergenceError(SummakitError, RuntimeError):
    """An iteration exhausted its step budget without meeting its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
