"""
Feed-forward network predicting the SUPG stabilization parameter.
"""

from .network import (
    DEFAULT_LAYER_SIZES,
    MlpModel,
    init_model,
    forward,
    forward_batch,
    loss,
    gradients,
    predict_tau,
)
from .training import TrainConfig, TrainingResult, train
from .persistence import save_model, load_model

__all__ = [
    'DEFAULT_LAYER_SIZES',
    'MlpModel',
    'init_model',
    'forward',
    'forward_batch',
    'loss',
    'gradients',
    'predict_tau',
    'TrainConfig',
    'TrainingResult',
    'train',
    'save_model',
    'load_model',
]
