"""Exception types shared across the package."""


class CapacityError(ValueError):
    """An exhaustive routine was asked to enumerate too large a ground set."""


class InfeasibleThresholdError(ValueError):
    """A threshold level lies outside [0, total weight]."""


class NotConcaveError(ValueError):
    """A sequence or curve fails its concavity requirement."""


class InvalidCurveError(ValueError):
    """A curve violates a monotonicity or sign requirement."""


class NumericalError(RuntimeError):
    """The solver produced a non-finite number."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class ParseError(ValueError):
    """Syntax or validation error in a problem or graph file."""

    def __init__(self, message, line=None, col=None):
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if col is not None:
                loc += f", col {col}"
            loc += ": "
        super().__init__(loc + message)
        self.line = line
        self.col = col
