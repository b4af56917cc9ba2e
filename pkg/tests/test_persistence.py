import numpy as np
import pytest

from core.errors import (
    ArtifactNotFoundError,
    DeserializationError,
    IncompatibleModelError,
    InvalidModelError,
)
from mlp import forward_batch, init_model, load_model, save_model


def _saved_lines(model, tmp_path):
    path = save_model(model, tmp_path / "model.txt")
    return path, path.read_text().splitlines()


def _write(path, lines):
    path.write_text("\n".join(lines) + "\n")
    return path


def test_round_trip_is_bit_exact(small_model, tmp_path, rng):
    path = save_model(small_model, tmp_path / "nested" / "model.txt")
    loaded = load_model(path)
    assert loaded.layer_sizes == small_model.layer_sizes
    assert loaded.activations == small_model.activations
    assert loaded.stats == small_model.stats
    for a, b in zip(loaded.weights + loaded.biases, small_model.weights + small_model.biases):
        np.testing.assert_array_equal(a, b)
    x = rng.normal(size=(4, 3))
    np.testing.assert_array_equal(forward_batch(loaded, x), forward_batch(small_model, x))


def test_model_without_stats(tmp_path):
    model = init_model(seed=1, layer_sizes=(3, 2, 1))
    _, lines = _saved_lines(model, tmp_path)
    assert "stats none" in lines
    assert load_model(tmp_path / "model.txt").stats is None


def test_file_layout(small_model, tmp_path):
    path, lines = _saved_lines(small_model, tmp_path)
    assert lines[0] == "supg-tau-mlp format 1"
    assert lines[2] == "layers 3 8 8 1"
    assert lines[3] == "activations relu relu linear"
    assert lines[5] == "weight 0 3 8"
    assert lines[-1] == "end"
    assert b"\r\n" not in path.read_bytes()


def test_missing_model(tmp_path):
    with pytest.raises(ArtifactNotFoundError) as excinfo:
        load_model(tmp_path / "model.txt")
    assert "python main.py train" in str(excinfo.value)
    assert excinfo.value.exit_code == 3


def test_wrong_magic(small_model, tmp_path):
    path, lines = _saved_lines(small_model, tmp_path)
    lines[0] = "some-other-model format 1"
    with pytest.raises(DeserializationError) as excinfo:
        load_model(_write(path, lines))
    assert excinfo.value.line == 1
    assert not isinstance(excinfo.value, IncompatibleModelError)


def test_future_format_is_incompatible(small_model, tmp_path):
    path, lines = _saved_lines(small_model, tmp_path)
    lines[0] = "supg-tau-mlp format 2"
    with pytest.raises(IncompatibleModelError) as excinfo:
        load_model(_write(path, lines))
    assert excinfo.value.line == 1


def test_truncated_file(small_model, tmp_path):
    path, lines = _saved_lines(small_model, tmp_path)
    with pytest.raises(DeserializationError, match="Unexpected end"):
        load_model(_write(path, lines[:9]))


def test_malformed_number_reports_line(small_model, tmp_path):
    path, lines = _saved_lines(small_model, tmp_path)
    values = lines[6].split()
    values[2] = "1.0.0"
    lines[6] = " ".join(values)
    with pytest.raises(DeserializationError) as excinfo:
        load_model(_write(path, lines))
    assert excinfo.value.line == 7


def test_wrong_value_count(small_model, tmp_path):
    path, lines = _saved_lines(small_model, tmp_path)
    lines[6] = " ".join(lines[6].split()[:-1])
    with pytest.raises(DeserializationError, match="Expected 8 values"):
        load_model(_write(path, lines))


def test_non_finite_weight(small_model, tmp_path):
    path, lines = _saved_lines(small_model, tmp_path)
    lines[6] = " ".join(["nan"] + lines[6].split()[1:])
    with pytest.raises(DeserializationError, match="Non-finite"):
        load_model(_write(path, lines))


def test_degenerate_stats(small_model, tmp_path):
    path, lines = _saved_lines(small_model, tmp_path)
    lines[4] = "stats 2 0 0.1 0.05 2 1"
    with pytest.raises(DeserializationError) as excinfo:
        load_model(_write(path, lines))
    assert excinfo.value.line == 5


def test_unknown_activation_is_rejected(small_model, tmp_path):
    path, lines = _saved_lines(small_model, tmp_path)
    lines[3] = "activations relu tanh linear"
    with pytest.raises(InvalidModelError):
        load_model(_write(path, lines))
