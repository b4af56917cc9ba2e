"""
Benchmark advection-diffusion problems.
"""

from .benchmarks import (
    ExactSolution,
    ProblemSpec,
    advection_from_angle,
    make_1d_validation,
    make_2d_training,
    make_2d_constant_forcing,
    make_2d_homogeneous,
    make_2d_atan,
)
from .catalog import ProblemCatalog
from .reference import reference_solution, as_exact, clear_reference_cache

__all__ = [
    'ExactSolution',
    'ProblemSpec',
    'advection_from_angle',
    'make_1d_validation',
    'make_2d_training',
    'make_2d_constant_forcing',
    'make_2d_homogeneous',
    'make_2d_atan',
    'ProblemCatalog',
    'reference_solution',
    'as_exact',
    'clear_reference_cache',
]
