"""
Error measures for discrete solutions.
"""

from .error_measures import (
    ErrorReport,
    nodal_error,
    norms,
    exact_nodal_values,
    compute_error_report,
)
from .lines import LineSegment, extract_line

__all__ = [
    'ErrorReport',
    'nodal_error',
    'norms',
    'exact_nodal_values',
    'compute_error_report',
    'LineSegment',
    'extract_line',
]
