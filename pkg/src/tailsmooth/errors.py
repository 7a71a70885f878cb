"""Exception hierarchy shared across the package."""


class TailSmoothError(Exception):
    """Base class for every error raised by tailsmooth."""


class InvalidSeries(TailSmoothError, ValueError):
    pass


class InvalidCDF(TailSmoothError, ValueError):
    pass


class InvalidQuantile(TailSmoothError, ValueError):
    pass


class InvalidParameter(TailSmoothError, ValueError):
    pass


class InsufficientWeights(TailSmoothError, ValueError):
    pass


class MissingPair(TailSmoothError, KeyError):
    pass


class InvalidLambda(TailSmoothError, ValueError):
    pass


class NoLimit(TailSmoothError, ArithmeticError):
    pass


class NoExceedances(TailSmoothError, ArithmeticError):
    """No observation lies above the level, so 1 - U/E is undefined."""


class DegenerateCopula(TailSmoothError, ArithmeticError):
    """The empirical copula diagonal is zero, so its logarithm is undefined."""


class EmptyCell(TailSmoothError, RuntimeError):
    """Every replica of an experiment cell produced an undefined estimate."""


class SeriesFormatError(TailSmoothError, ValueError):
    """Malformed series or weights CSV; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
