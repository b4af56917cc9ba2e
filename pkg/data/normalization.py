"""
Feature standardization for the tau regression.

Features are (r, h, log10 Pe_g), each shifted by its training-split mean
and divided by its sample standard deviation. The target is -log10(tau*).
"""

from dataclasses import asdict, dataclass
from typing import Dict, Tuple

import numpy as np
import pandas as pd

from core.errors import InvalidArgumentError, NormalizationError

FEATURE_COLUMNS = ("r", "h", "pe_g")


@dataclass(frozen=True)
class NormalizationStats:
    mean_r: float
    std_r: float
    mean_h: float
    std_h: float
    mean_log10_pe: float
    std_log10_pe: float

    def __post_init__(self):
        values = asdict(self)
        if not all(np.isfinite(v) for v in values.values()):
            raise NormalizationError(f"Non-finite normalization statistics: {values}")
        for name in ("std_r", "std_h", "std_log10_pe"):
            if values[name] <= 0.0:
                raise NormalizationError(
                    f"{name} is {values[name]}; the training split does not vary in this feature")

    @classmethod
    def from_frame(cls, training: pd.DataFrame) -> "NormalizationStats":
        """Sample statistics (ddof=1) of a training split."""
        if len(training) < 2:
            raise NormalizationError(f"Need at least 2 training records, got {len(training)}")
        r = training["r"].to_numpy(dtype=float)
        h = training["h"].to_numpy(dtype=float)
        log_pe = np.log10(training["pe_g"].to_numpy(dtype=float))
        return cls(
            mean_r=float(np.mean(r)),
            std_r=float(np.std(r, ddof=1)),
            mean_h=float(np.mean(h)),
            std_h=float(np.std(h, ddof=1)),
            mean_log10_pe=float(np.mean(log_pe)),
            std_log10_pe=float(np.std(log_pe, ddof=1)),
        )

    @property
    def means(self) -> np.ndarray:
        return np.array([self.mean_r, self.mean_h, self.mean_log10_pe])

    @property
    def stds(self) -> np.ndarray:
        return np.array([self.std_r, self.std_h, self.std_log10_pe])

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


def normalize_features(r, h, pe_g, stats: NormalizationStats) -> np.ndarray:
    """Standardized feature matrix of shape (n, 3)."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    h = np.atleast_1d(np.asarray(h, dtype=float))
    pe_g = np.atleast_1d(np.asarray(pe_g, dtype=float))
    if np.any(h <= 0) or np.any(pe_g <= 0) or np.any(r <= 0):
        raise InvalidArgumentError("Features r, h and pe_g must be positive")
    raw = np.column_stack(np.broadcast_arrays(r, h, np.log10(pe_g)))
    return (raw - stats.means) / stats.stds


def denormalize_features(x: np.ndarray, stats: NormalizationStats) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inverse of normalize_features: returns (r, h, pe_g)."""
    raw = np.atleast_2d(np.asarray(x, dtype=float)) * stats.stds + stats.means
    return raw[:, 0], raw[:, 1], 10.0 ** raw[:, 2]


def normalize_target(tau) -> np.ndarray:
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if np.any(~np.isfinite(tau)) or np.any(tau <= 0):
        raise InvalidArgumentError("tau values must be positive and finite")
    return -np.log10(tau)


def denormalize_target(y) -> np.ndarray:
    return 10.0 ** (-np.asarray(y, dtype=float))


def normalize(records: pd.DataFrame, stats: NormalizationStats) -> Tuple[np.ndarray, np.ndarray]:
    """Feature matrix and target vector for a frame of dataset records."""
    missing = [c for c in FEATURE_COLUMNS + ("tau_star",) if c not in records.columns]
    if missing:
        raise InvalidArgumentError(f"Records lack columns {missing}")
    x = normalize_features(records["r"], records["h"], records["pe_g"], stats)
    y = normalize_target(records["tau_star"])
    return x, y
