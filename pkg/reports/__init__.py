"""
Tables and manifests written by the command line.
"""

from .tables import (
    write_csv,
    write_json,
    summarize_sweep,
    summarize_norms,
    generate_summary_stats,
)
from .manifest import RunManifest

__all__ = [
    'write_csv',
    'write_json',
    'summarize_sweep',
    'summarize_norms',
    'generate_summary_stats',
    'RunManifest',
]
