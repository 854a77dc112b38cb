"""Exception types raised across the package."""


class AGMAError(Exception):
    """Base class for package errors."""


class DimensionError(AGMAError, ValueError):
    """Vector or dataset shapes do not agree."""


class ConstantsUnavailableError(AGMAError):
    """Analytic constants are undefined for the requested loss family."""


class StepsizeRangeError(AGMAError, ValueError):
    """Stepsize lies outside the open interval (0, 2 / (mu_h * L))."""


class ScheduleRangeError(AGMAError, ValueError):
    """A momentum-schedule argument is outside its admissible range."""


class BoundNotValidError(AGMAError, ValueError):
    """A convergence bound was requested outside the range where it holds."""


class DivergenceError(AGMAError, ArithmeticError):
    """An iterate became non-finite.

    Attributes
    ----------
    k : int
        Iteration index at which the non-finite value appeared.
    """

    def __init__(self, k, message=None):
        self.k = k
        super().__init__(message or f"non-finite iterate at k={k}")


class DataError(AGMAError, ValueError):
    """Input data could not be parsed or mapped."""


class ConfigError(AGMAError, ValueError):
    """An experiment configuration failed validation.

    Attributes
    ----------
    path : str
        Dotted path to the offending field.
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
