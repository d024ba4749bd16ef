"""Exception hierarchy shared by every lab module."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .trainer.types import RunRecord


class LabError(Exception):
    """Base exception for all lab errors."""
    pass


class DimensionError(LabError, ValueError):
    """Raised when operand shapes do not agree."""

    def __init__(self, message: str, expected: Any = None, actual: Any = None):
        super().__init__(message)
        self.expected = expected
        self.actual = actual


class DomainError(LabError, ValueError):
    """Raised when an input lies outside an operation's domain (e.g. log of 0)."""
    pass


class DegenerateInputError(LabError, ValueError):
    """Raised for zero-norm rows, duplicate points, empty sets and similar."""
    pass


class NonFiniteError(LabError, ArithmeticError):
    """Raised when an operation produces NaN or Inf from finite inputs."""

    def __init__(self, op: str):
        super().__init__(f"Operation '{op}' produced a non-finite value")
        self.op = op


class ContractError(LabError):
    """Raised when a caller violates an operation's precondition."""
    pass


class NumericError(LabError, ArithmeticError):
    """Raised when an iterative numerical routine fails to converge."""
    pass


class SpecError(LabError, ValueError):
    """Raised for invalid model or world specifications."""
    pass


class ConfigError(LabError, ValueError):
    """Raised for invalid training or experiment configuration."""
    pass


class UnsupportedError(LabError):
    """Raised when an operation is not defined for the given variant."""
    pass


class ParameterError(LabError, ValueError):
    """Raised when a numeric parameter is out of range for the data."""
    pass


class InsufficientDataError(LabError, ValueError):
    """Raised when there are too few rows for a statistic."""
    pass


class DegenerateTaskError(LabError, ValueError):
    """Raised when a supervised task is trivial (e.g. a single class)."""
    pass


class AssumptionInfeasibleError(LabError):
    """Raised when task supports meeting the recovery assumptions cannot be drawn or do not hold."""

    def __init__(self, message: str, attempts: int = 0):
        super().__init__(message)
        self.attempts = attempts


class FormatError(LabError, ValueError):
    """Raised when a file does not match its binary format."""

    def __init__(self, message: str, path: str | None = None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class DivergenceError(LabError, ArithmeticError):
    """Raised when training produces NaN losses or gradients.

    The partial run record (up to the failing step) is attached so callers
    can persist a diagnostic trace.
    """

    def __init__(self, message: str, step: int | None = None, record: RunRecord | None = None):
        super().__init__(message)
        self.step = step
        self.record = record
