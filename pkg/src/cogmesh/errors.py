"""Exception types shared across the package."""


class CogmeshError(Exception):
    """Base class for all errors raised by this package."""


class InputDomainError(CogmeshError, ValueError):
    """A value lies outside the domain an operation accepts."""


class ProtocolError(CogmeshError, RuntimeError):
    """A state-machine operation was invoked in the wrong mode."""


class UnknownEntityError(CogmeshError, KeyError):
    """A channel or primary-user id is not registered."""


class CapacityError(CogmeshError, RuntimeError):
    """A requested model exceeds configured size limits."""


class NumericalError(CogmeshError, ArithmeticError):
    """A numerical solve failed to reach the required tolerance."""


class UndefinedMetricError(CogmeshError, ArithmeticError):
    """A metric has no defined value for the given model."""


class ValidationError(CogmeshError, ValueError):
    """Configuration failed schema or cross-field validation.

    ``violations`` lists every problem found, not just the first.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class TraceParseError(CogmeshError, ValueError):
    """A stored trace file is malformed."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")
