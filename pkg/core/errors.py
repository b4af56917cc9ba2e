"""
Exception hierarchy shared by every package.

Each exception carries the exit code the command-line entry point
returns when it escapes a command.
"""

from typing import Optional


class SupgError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class InvalidArgumentError(SupgError, ValueError):
    """An argument is outside its documented domain."""

    exit_code = 2


class UnsupportedDegreeError(InvalidArgumentError):
    """Lagrange degree outside 1..4."""


class OutOfDomainError(InvalidArgumentError):
    """A point lies outside the closure of the computational domain."""


class UnsupportedMetricError(InvalidArgumentError):
    """A metric needs data the problem does not provide (e.g. a gradient)."""


class ArtifactNotFoundError(SupgError, FileNotFoundError):
    """An upstream file is missing; the message names the producing command."""

    exit_code = 3

    def __init__(self, path: str, producer: Optional[str] = None):
        self.path = str(path)
        self.producer = producer
        message = f"Required file not found: {self.path}"
        if producer:
            message += f" (create it with `{producer}`)"
        super().__init__(message)


class NumericalError(SupgError, RuntimeError):
    """Base class for failures of the numerical pipeline."""

    exit_code = 4


class AssemblyError(NumericalError):
    """Non-finite data met while assembling a cell."""

    def __init__(self, message: str, cell: Optional[int] = None):
        self.cell = cell
        if cell is not None:
            message = f"{message} (cell {cell})"
        super().__init__(message)


class SolverError(NumericalError):
    """Sparse factorization or back-substitution failed."""


class OptimizationError(NumericalError):
    """The τ search could not find a finite objective value."""


class NormalizationError(NumericalError):
    """Feature statistics are degenerate (zero standard deviation)."""


class TrainingError(NumericalError):
    """Training diverged."""

    def __init__(self, message: str, epoch: Optional[int] = None):
        self.epoch = epoch
        if epoch is not None:
            message = f"{message} at epoch {epoch}"
        super().__init__(message)


class InvalidModelError(NumericalError):
    """A model cannot be used for prediction."""


class DeserializationError(InvalidModelError):
    """A model file is malformed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)


class IncompatibleModelError(DeserializationError):
    """A model file was written by an incompatible format version."""
