"""Exception types raised across the toolkit."""


class QipkitError(ValueError):
    """Base class for all toolkit errors."""


class DimensionError(QipkitError):
    """Operand shapes are incompatible."""


class NotHermitianError(QipkitError):
    pass


class NotUnitaryError(QipkitError):
    pass


class ConvergenceError(QipkitError, RuntimeError):
    """The eigensolver exhausted its sweep budget."""


class InvalidStateError(QipkitError):
    """A state, ensemble or Bloch vector violates its invariants."""


class InvalidMeasurementError(QipkitError):
    """Projectors or POVM effects do not form a valid measurement."""


class CircuitParseError(QipkitError):
    """Malformed circuit text. Carries the 1-based line and column."""

    def __init__(self, message, line, column=1):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")
