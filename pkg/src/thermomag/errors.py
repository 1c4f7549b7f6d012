"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


class SingularityError(ValueError):
    """A formula's denominator vanishes for the given inputs."""


class ParameterError(ValueError):
    """Numerical parameters violate a stability or consistency bound."""


class ConfigError(ValueError):
    """Invalid CLI configuration."""


class ConvergenceError(RuntimeError):
    """An iterative numerical method exhausted its budget.

    The best available estimate is kept on ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
