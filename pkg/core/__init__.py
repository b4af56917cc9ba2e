"""
Shared configuration, logging and error types.
"""

from .errors import (
    SupgError,
    InvalidArgumentError,
    UnsupportedDegreeError,
    OutOfDomainError,
    UnsupportedMetricError,
    ArtifactNotFoundError,
    NumericalError,
    AssemblyError,
    SolverError,
    OptimizationError,
    NormalizationError,
    TrainingError,
    InvalidModelError,
    DeserializationError,
    IncompatibleModelError,
)
from .settings import VERSION, OptimizerSettings, Settings
from .log import configure_logging

__all__ = [
    'SupgError',
    'InvalidArgumentError',
    'UnsupportedDegreeError',
    'OutOfDomainError',
    'UnsupportedMetricError',
    'ArtifactNotFoundError',
    'NumericalError',
    'AssemblyError',
    'SolverError',
    'OptimizationError',
    'NormalizationError',
    'TrainingError',
    'InvalidModelError',
    'DeserializationError',
    'IncompatibleModelError',
    'VERSION',
    'OptimizerSettings',
    'Settings',
    'configure_logging',
]
