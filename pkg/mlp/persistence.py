"""
Versioned plain-text model files.

Layout:

    supg-tau-mlp format 1
    code 1.0.0
    layers 3 64 64 64 1
    activations relu relu relu relu
    stats <mean_r> <std_r> <mean_h> <std_h> <mean_log10_pe> <std_log10_pe>
    weight 0 3 64
    <fan_in rows of fan_out values>
    bias 0 64
    <one row of values>
    ...
    end

Values are written with 17 significant digits, so a save/load round trip
is bit-exact.
"""

import logging
from pathlib import Path
from typing import List, Tuple

import numpy as np

from core.errors import (
    ArtifactNotFoundError,
    DeserializationError,
    IncompatibleModelError,
    NormalizationError,
)
from core.settings import VERSION
from data.normalization import NormalizationStats
from .network import MlpModel

logger = logging.getLogger(__name__)

MAGIC = "supg-tau-mlp"
FORMAT_VERSION = 1
STATS_FIELDS = ("mean_r", "std_r", "mean_h", "std_h", "mean_log10_pe", "std_log10_pe")


def _fmt(values) -> str:
    return " ".join(f"{float(v):.17g}" for v in np.ravel(values))


def save_model(model: MlpModel, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        f"{MAGIC} format {FORMAT_VERSION}",
        f"code {VERSION}",
        "layers " + " ".join(str(s) for s in model.layer_sizes),
        "activations " + " ".join(model.activations),
    ]
    if model.stats is None:
        lines.append("stats none")
    else:
        lines.append("stats " + _fmt([getattr(model.stats, f) for f in STATS_FIELDS]))
    for k, (w, b) in enumerate(zip(model.weights, model.biases)):
        lines.append(f"weight {k} {w.shape[0]} {w.shape[1]}")
        lines.extend(_fmt(row) for row in w)
        lines.append(f"bias {k} {b.shape[0]}")
        lines.append(_fmt(b))
    lines.append("end")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
    logger.info("Model saved to %s", path)
    return path


class _Lines:
    """Numbered line reader that reports where parsing failed."""

    def __init__(self, text: str):
        self._lines: List[str] = text.splitlines()
        self.number = 0

    def next(self, what: str) -> str:
        if self.number >= len(self._lines):
            raise DeserializationError(f"Unexpected end of file while reading {what}", line=self.number + 1)
        line = self._lines[self.number].strip()
        self.number += 1
        return line

    def keyword(self, keyword: str) -> List[str]:
        parts = self.next(keyword).split()
        if not parts or parts[0] != keyword:
            raise DeserializationError(f"Expected '{keyword}'", line=self.number)
        return parts[1:]

    def floats(self, count: int, what: str) -> np.ndarray:
        parts = self.next(what).split()
        if len(parts) != count:
            raise DeserializationError(f"Expected {count} values for {what}, got {len(parts)}", line=self.number)
        try:
            values = np.array([float(p) for p in parts])
        except ValueError:
            raise DeserializationError(f"Malformed number in {what}", line=self.number) from None
        if not np.all(np.isfinite(values)):
            raise DeserializationError(f"Non-finite value in {what}", line=self.number)
        return values

    def ints(self, parts: List[str], what: str) -> Tuple[int, ...]:
        try:
            return tuple(int(p) for p in parts)
        except ValueError:
            raise DeserializationError(f"Malformed integer in {what}", line=self.number) from None


def load_model(path: Path) -> MlpModel:
    """Parse a model file; any defect raises before a model is built."""
    path = Path(path)
    if not path.exists():
        raise ArtifactNotFoundError(path, producer="python main.py train")
    reader = _Lines(path.read_text(encoding="utf-8"))

    header = reader.next("header").split()
    if len(header) != 3 or header[0] != MAGIC or header[1] != "format":
        raise DeserializationError("Not a model file", line=1)
    if header[2] != str(FORMAT_VERSION):
        raise IncompatibleModelError(
            f"Model format {header[2]} is not supported (expected {FORMAT_VERSION})", line=1)

    reader.keyword("code")
    sizes = reader.ints(reader.keyword("layers"), "layers")
    if len(sizes) < 2 or any(s < 1 for s in sizes):
        raise DeserializationError(f"Invalid layer sizes {sizes}", line=reader.number)
    activations = tuple(reader.keyword("activations"))
    if len(activations) != len(sizes) - 1:
        raise DeserializationError("Activation count does not match layers", line=reader.number)

    raw_stats = reader.keyword("stats")
    stats = None
    if raw_stats != ["none"]:
        if len(raw_stats) != len(STATS_FIELDS):
            raise DeserializationError("Expected 6 normalization statistics", line=reader.number)
        try:
            stats = NormalizationStats(**{f: float(v) for f, v in zip(STATS_FIELDS, raw_stats)})
        except (ValueError, NormalizationError) as e:
            raise DeserializationError(f"Invalid normalization statistics: {e}", line=reader.number) from None

    weights, biases = [], []
    for k in range(len(sizes) - 1):
        fan_in, fan_out = sizes[k], sizes[k + 1]
        if reader.ints(reader.keyword("weight"), "weight header") != (k, fan_in, fan_out):
            raise DeserializationError(f"Expected weight header 'weight {k} {fan_in} {fan_out}'",
                                       line=reader.number)
        weights.append(np.vstack([reader.floats(fan_out, f"weight {k}") for _ in range(fan_in)]))
        if reader.ints(reader.keyword("bias"), "bias header") != (k, fan_out):
            raise DeserializationError(f"Expected bias header 'bias {k} {fan_out}'", line=reader.number)
        biases.append(reader.floats(fan_out, f"bias {k}"))
    reader.keyword("end")

    return MlpModel(layer_sizes=sizes, weights=tuple(weights), biases=tuple(biases),
                    activations=activations, stats=stats)
