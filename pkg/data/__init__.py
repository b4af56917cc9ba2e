"""
Training dataset: generation, persistence, splitting and normalization.
"""

from .normalization import (
    NormalizationStats,
    normalize,
    normalize_features,
    denormalize_features,
    normalize_target,
    denormalize_target,
)
from .generate_dataset import (
    TauRecord,
    records_to_frame,
    optimize_record,
    generate_dataset,
    save_dataset,
    load_dataset,
    load_metadata,
    split,
)

__all__ = [
    'NormalizationStats',
    'normalize',
    'normalize_features',
    'denormalize_features',
    'normalize_target',
    'denormalize_target',
    'TauRecord',
    'records_to_frame',
    'optimize_record',
    'generate_dataset',
    'save_dataset',
    'load_dataset',
    'load_metadata',
    'split',
]
