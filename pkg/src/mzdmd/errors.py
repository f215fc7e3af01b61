"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge or overflowed."""


class SingularMatrixError(NumericalError):
    """A linear solve was refused because the matrix is singular or too
    ill-conditioned; carries the condition estimate that triggered it."""

    def __init__(self, message, cond=None):
        super().__init__(message)
        self.cond = cond


class DivergenceError(NumericalError):
    """An iteration produced a non-finite state or loss."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class EnsembleError(NumericalError):
    """One or more ensemble samples failed to fit; carries (index, error) pairs."""

    def __init__(self, message, failures=()):
        super().__init__(message)
        self.failures = list(failures)


class ConfigError(ValueError):
    """A configuration file could not be parsed or violates a constraint."""

    def __init__(self, message, field=None, line=None):
        super().__init__(message)
        self.field = field
        self.line = line
