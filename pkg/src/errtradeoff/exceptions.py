"""Exception hierarchy shared by the library and the CLI."""


class ErrTradeoffError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(ErrTradeoffError, ValueError):
    """Dimension mismatch, bad shape, or an input that violates a type invariant."""


class NumericalConsistencyError(ErrTradeoffError, ArithmeticError):
    """Two quantities that must agree analytically disagree beyond tolerance."""


class NonJointMeasurementError(InvalidArgumentError):
    """The two joint observables fail to commute."""


class UnsupportedRelationError(InvalidArgumentError):
    """The requested relation has no closed form for the requested operation."""


class ScenarioError(InvalidArgumentError):
    """A scenario file or preset could not be loaded."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
