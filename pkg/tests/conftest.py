import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from data.normalization import NormalizationStats  # noqa: E402
from mlp import init_model  # noqa: E402
from problems import make_1d_validation  # noqa: E402


@pytest.fixture
def validation_problem():
    """1D boundary layer with Pe_h = 12.5 on the n = 20 mesh."""
    h = 1.0 / 20
    return make_1d_validation(h / (2 * 12.5))


@pytest.fixture
def unit_stats():
    return NormalizationStats(mean_r=2.0, std_r=1.0, mean_h=0.1, std_h=0.05,
                              mean_log10_pe=2.0, std_log10_pe=1.0)


@pytest.fixture
def small_model(unit_stats):
    return init_model(seed=3, layer_sizes=(3, 8, 8, 1), output_activation="linear", stats=unit_stats)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
