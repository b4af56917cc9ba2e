"""
Fully connected feed-forward network in numpy.

Layers compute a = act(a_prev @ W + b) with W of shape (fan_in, fan_out).
The loss is J = 1/(2m) * sum((y_hat - y)^2), and gradients come from
plain backpropagation.
"""

from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.errors import InvalidArgumentError, InvalidModelError
from data.normalization import NormalizationStats, denormalize_target, normalize_features

DEFAULT_LAYER_SIZES = (3, 64, 64, 64, 1)
ACTIVATIONS = ("relu", "linear")


def _activate(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return np.maximum(z, 0.0)
    return z


def _activation_slope(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return (z > 0.0).astype(float)
    return np.ones_like(z)


@dataclass(frozen=True, eq=False)
class MlpModel:
    layer_sizes: Tuple[int, ...]
    weights: Tuple[np.ndarray, ...]
    biases: Tuple[np.ndarray, ...]
    activations: Tuple[str, ...]
    stats: Optional[NormalizationStats] = None

    def __post_init__(self):
        n_layers = len(self.layer_sizes) - 1
        if n_layers < 1 or any(s < 1 for s in self.layer_sizes):
            raise InvalidModelError(f"Invalid layer sizes {self.layer_sizes}")
        if not (len(self.weights) == len(self.biases) == len(self.activations) == n_layers):
            raise InvalidModelError("Weights, biases and activations must match the layer count")
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            expected = (self.layer_sizes[k], self.layer_sizes[k + 1])
            if w.shape != expected or b.shape != (expected[1],):
                raise InvalidModelError(
                    f"Layer {k}: weight {w.shape} / bias {b.shape}, expected {expected} / ({expected[1]},)")
        unknown = set(self.activations) - set(ACTIVATIONS)
        if unknown:
            raise InvalidModelError(f"Unknown activations {sorted(unknown)}")

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    @property
    def n_parameters(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(w)) and np.all(np.isfinite(b))
                   for w, b in zip(self.weights, self.biases))

    def with_parameters(self, weights: Sequence[np.ndarray], biases: Sequence[np.ndarray]) -> "MlpModel":
        return replace(self, weights=tuple(np.array(w, dtype=float) for w in weights),
                       biases=tuple(np.array(b, dtype=float) for b in biases))


def init_model(seed: int = 0, layer_sizes: Sequence[int] = DEFAULT_LAYER_SIZES,
               output_activation: str = "relu",
               stats: Optional[NormalizationStats] = None) -> MlpModel:
    """
    He-uniform weights in [-sqrt(6/fan_in), sqrt(6/fan_in)] and zero biases.

    Hidden layers use ReLU; the output layer uses `output_activation`
    ("relu" or "linear").
    """
    if output_activation not in ACTIVATIONS:
        raise InvalidArgumentError(f"Unknown output activation {output_activation!r}")
    layer_sizes = tuple(int(s) for s in layer_sizes)
    if len(layer_sizes) < 2 or any(s < 1 for s in layer_sizes):
        raise InvalidArgumentError(f"Invalid layer sizes {layer_sizes}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    activations = ("relu",) * (len(layer_sizes) - 2) + (output_activation,)
    return MlpModel(layer_sizes=layer_sizes, weights=tuple(weights), biases=tuple(biases),
                    activations=activations, stats=stats)


def _as_batch(model: MlpModel, x) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != model.layer_sizes[0]:
        raise InvalidArgumentError(f"Expected {model.layer_sizes[0]} features, got {x.shape[1]}")
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError("Network inputs must be finite")
    return x


def _forward_pass(model: MlpModel, x: np.ndarray) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Pre-activations z_k and activations a_k (a_0 = x) of every layer."""
    pre, post = [], [x]
    a = x
    for w, b, kind in zip(model.weights, model.biases, model.activations):
        z = a @ w + b
        a = _activate(z, kind)
        pre.append(z)
        post.append(a)
    return pre, post


def forward_batch(model: MlpModel, x) -> np.ndarray:
    """Network outputs for a batch of normalized feature rows, shape (n,)."""
    _, post = _forward_pass(model, _as_batch(model, x))
    return post[-1][:, 0]


def forward(model: MlpModel, x) -> float:
    """Output for a single normalized feature vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise InvalidArgumentError(f"forward takes one feature vector, got shape {x.shape}")
    return float(forward_batch(model, x)[0])


def loss(model: MlpModel, x, y) -> float:
    y_hat = forward_batch(model, x)
    y = np.asarray(y, dtype=float).reshape(-1)
    return float(np.sum((y_hat - y) ** 2) / (2 * y.size))


def gradients(model: MlpModel, x, y) -> Tuple[float, List[np.ndarray], List[np.ndarray]]:
    """
    Loss and its gradients with respect to every weight and bias.

    Returns:
        (J, weight gradients, bias gradients), gradients ordered like the layers
    """
    x = _as_batch(model, x)
    y = np.asarray(y, dtype=float).reshape(-1, 1)
    if y.shape[0] != x.shape[0]:
        raise InvalidArgumentError(f"{x.shape[0]} inputs but {y.shape[0]} targets")
    m = x.shape[0]
    pre, post = _forward_pass(model, x)
    residual = post[-1] - y
    value = float(np.sum(residual ** 2) / (2 * m))

    grad_w: List[np.ndarray] = [None] * model.n_layers
    grad_b: List[np.ndarray] = [None] * model.n_layers
    delta = (residual / m) * _activation_slope(pre[-1], model.activations[-1])
    for k in range(model.n_layers - 1, -1, -1):
        grad_w[k] = post[k].T @ delta
        grad_b[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ model.weights[k].T) * _activation_slope(pre[k - 1], model.activations[k - 1])
    return value, grad_w, grad_b


def predict_tau(model: MlpModel, r, h, pe_g):
    """
    tau_ANN = 10^(-network(normalized features)).

    Scalars in give a float out; arrays give an array.
    """
    if model.stats is None:
        raise InvalidModelError("Model has no normalization statistics attached")
    if not model.is_finite():
        raise InvalidModelError("Model parameters are not finite")
    scalar = np.ndim(r) == 0 and np.ndim(h) == 0 and np.ndim(pe_g) == 0
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr != np.round(r_arr)):
        raise InvalidArgumentError(f"Degree must be an integer, got {r}")
    features = normalize_features(r, h, pe_g, model.stats)
    tau = denormalize_target(forward_batch(model, features))
    if scalar:
        return float(tau[0])
    return tau
