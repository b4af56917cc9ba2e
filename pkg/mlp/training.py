"""
Mini-batch SGD with momentum for the tau network.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from core.errors import InvalidArgumentError, TrainingError
from data.normalization import normalize
from .network import MlpModel, forward_batch, gradients

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    momentum: float = 0.9
    batch_size: int = 32
    epochs: int = 500
    seed: int = 0
    shuffle: bool = True
    patience: Optional[int] = 50

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise InvalidArgumentError(f"learning_rate must be positive, got {self.learning_rate}")
        if not 0.0 <= self.momentum < 1.0:
            raise InvalidArgumentError(f"momentum must lie in [0, 1), got {self.momentum}")
        if self.batch_size < 1:
            raise InvalidArgumentError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 1:
            raise InvalidArgumentError(f"epochs must be >= 1, got {self.epochs}")
        if self.patience is not None and self.patience < 1:
            raise InvalidArgumentError(f"patience must be >= 1, got {self.patience}")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TrainingResult:
    model: MlpModel
    history: pd.DataFrame
    best_epoch: int
    stopped_early: bool


def _mse(model: MlpModel, x: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean((forward_batch(model, x) - y) ** 2))


def train(model: MlpModel, training: pd.DataFrame, validation: pd.DataFrame,
          config: TrainConfig = TrainConfig(), show_progress: bool = True) -> TrainingResult:
    """
    Fit the network to -log10(tau*) on the normalized features.

    Each epoch shuffles the training split (seeded), walks it in
    mini-batches and applies v <- momentum * v - lr * grad, w <- w + v.
    When validation MSE has not improved for `patience` epochs, training
    stops and the best epoch's parameters are restored.

    Returns:
        TrainingResult with the trained model and a per-epoch history
        (epoch, train_mse, val_mse)
    """
    if model.stats is None:
        raise InvalidArgumentError("Attach normalization statistics to the model before training")
    if len(training) == 0 or len(validation) == 0:
        raise InvalidArgumentError("Training and validation splits must be nonempty")
    x_train, y_train = normalize(training, model.stats)
    x_val, y_val = normalize(validation, model.stats)

    weights = [w.copy() for w in model.weights]
    biases = [b.copy() for b in model.biases]
    vel_w = [np.zeros_like(w) for w in weights]
    vel_b = [np.zeros_like(b) for b in biases]
    rng = np.random.default_rng(config.seed)
    m = x_train.shape[0]

    history = []
    best_val = np.inf
    best_epoch = 0
    best_params = (model.weights, model.biases)
    stopped_early = False
    current = model

    for epoch in tqdm(range(1, config.epochs + 1), desc="Training", disable=not show_progress):
        order = rng.permutation(m) if config.shuffle else np.arange(m)
        for start in range(0, m, config.batch_size):
            batch = order[start:start + config.batch_size]
            value, grad_w, grad_b = gradients(current, x_train[batch], y_train[batch])
            if not np.isfinite(value):
                raise TrainingError("Loss became non-finite", epoch=epoch)
            for k in range(len(weights)):
                vel_w[k] = config.momentum * vel_w[k] - config.learning_rate * grad_w[k]
                vel_b[k] = config.momentum * vel_b[k] - config.learning_rate * grad_b[k]
                weights[k] = weights[k] + vel_w[k]
                biases[k] = biases[k] + vel_b[k]
            current = model.with_parameters(weights, biases)

        train_mse = _mse(current, x_train, y_train)
        val_mse = _mse(current, x_val, y_val)
        if not (np.isfinite(train_mse) and np.isfinite(val_mse)):
            raise TrainingError("Loss became non-finite", epoch=epoch)
        history.append({"epoch": epoch, "train_mse": train_mse, "val_mse": val_mse})

        if val_mse < best_val:
            best_val = val_mse
            best_epoch = epoch
            best_params = (current.weights, current.biases)
        elif config.patience is not None and epoch - best_epoch >= config.patience:
            logger.info("Early stopping at epoch %d; restoring epoch %d (val MSE %.4e)",
                        epoch, best_epoch, best_val)
            current = model.with_parameters(*best_params)
            stopped_early = True
            break

    return TrainingResult(model=current, history=pd.DataFrame(history),
                          best_epoch=best_epoch, stopped_early=stopped_early)
