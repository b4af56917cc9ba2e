import json
import math

import numpy as np
import pandas as pd
import pytest

from data import TauRecord, records_to_frame, save_dataset
from main import main
from mlp import save_model
from pipeline import Evaluator

FAST = ["--bracket", "1e-6", "1", "--tol", "1e-2", "--budget", "30"]


@pytest.fixture
def out(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    for name in ("SUPG_OUTPUT_DIR", "SUPG_WORKERS", "SUPG_LOG_LEVEL", "SUPG_REFERENCE_N", "SUPG_CACHE_DIR"):
        monkeypatch.delenv(name, raising=False)
    return tmp_path / "results"


def run(out, *args):
    return main(["--output-dir", str(out), "--quiet", *args])


def manifest(out, command):
    return json.loads((out / f"manifest_{command}.json").read_text())


@pytest.fixture
def dataset(out):
    records = [TauRecord(r=1 + i % 3, h=math.sqrt(2) / (10 * (1 + i % 2)), pe_g=7.0 * 3 ** i,
                         mu=math.sqrt(2) / (14.0 * 3 ** i), tau_star=10.0 ** (-1 - i / 3),
                         e_at_star=0.01, seed=i)
               for i in range(10)]
    return save_dataset(records_to_frame(records), out / "dataset.csv", metadata={"seed": 0})


def test_solve(out):
    code = run(out, "solve", "val1d", "--n", "20", "--r", "1", "--pe-h", "12.5", "--line", "x", "--samples", "11")
    assert code == 0
    nodal = pd.read_csv(out / "solve_val1d_n20_r1_solution.csv")
    assert list(nodal.columns) == ["x", "value"]
    assert len(nodal) == 21
    assert len(pd.read_csv(out / "solve_val1d_n20_r1_line.csv")) == 11
    report = json.loads((out / "solve_val1d_n20_r1_report.json").read_text())
    assert report["tau_mode"] == "theory"
    assert report["e_nodal"] <= 1e-8
    assert report["problem"]["has_exact"] is True
    meta = manifest(out, "solve")
    assert meta["status"] == "ok"
    assert len(meta["outputs"]) == 3


def test_solve_needs_one_diffusion_argument(out):
    assert run(out, "solve", "val1d", "--n", "10", "--mu", "0.01", "--pe-h", "5") == 2
    meta = manifest(out, "solve")
    assert meta["status"] == "failed"
    assert meta["error"].startswith("InvalidArgumentError")


def test_unknown_tau_mode(out):
    assert run(out, "solve", "val1d", "--n", "10", "--mu", "0.01", "--tau-mode", "magic") == 2


def test_invalid_worker_count(out, tmp_path):
    assert run(out, "--workers", "0", "solve", "val1d", "--n", "10", "--mu", "0.01") == 2
    # settings were never resolved, so the manifest lands in the default directory
    assert (tmp_path / "results" / "manifest_solve.json").exists()


def test_argparse_errors_exit_with_two(out):
    with pytest.raises(SystemExit) as excinfo:
        run(out, "solve", "nosuchproblem", "--n", "10")
    assert excinfo.value.code == 2


def test_tauopt_single_configuration(out):
    assert run(out, *FAST, "tauopt", "val1d", "--n", "10", "--pe-h", "5") == 0
    payload = json.loads((out / "tauopt.json").read_text())
    assert 1e-6 <= payload["tau_star"] <= 1.0
    assert payload["evaluations"] <= 30
    assert payload["e_theory"] >= 0


@pytest.mark.slow
def test_tauopt_sweep(out):
    code = run(out, *FAST, "tauopt", "val1d", "--sweep", "pe_h=1:10:log:2", "--r-values", "1,2",
               "--n-values", "10")
    assert code == 0
    frame = pd.read_csv(out / "tauopt_sweep.csv", keep_default_na=False)
    assert len(frame) == 4
    assert (frame["error"] == "").all()


def test_tauopt_bad_grid(out):
    assert run(out, "tauopt", "val1d", "--sweep", "pe_h=1:10:cubic:2", "--n-values", "10") == 2


def test_generate(out):
    code = run(out, *FAST, "generate", "--m", "2", "--seed", "1", "--r-set", "1", "--n-set", "4",
               "--pe-range", "7", "70")
    assert code == 0
    frame = pd.read_csv(out / "dataset.csv")
    assert len(frame) == 2
    assert list(frame["seed"]) == [1, 0]
    meta = json.loads((out / "dataset.meta.json").read_text())
    assert meta["sampling"] == "log-uniform"
    assert meta["h_set"] == [pytest.approx(math.sqrt(2) / 4)]
    assert manifest(out, "generate")["seeds"] == {"dataset": 1}


def test_train_and_predict(out, dataset):
    code = run(out, "train", "--epochs", "5", "--batch-size", "2", "--patience", "0", "--seed", "3")
    assert code == 0
    assert (out / "model.txt").read_text().startswith("supg-tau-mlp format 1")
    history = pd.read_csv(out / "model_history.csv")
    assert list(history["epoch"]) == [1, 2, 3, 4, 5]
    assert manifest(out, "train")["config"]["train"]["epochs"] == 5

    assert run(out, "predict", "--model", str(out / "model.txt"), "--r", "2", "--h", "0.0707",
               "--pe-g", "300") == 0
    prediction = json.loads((out / "prediction.json").read_text())
    assert prediction["tau_ann"] > 0
    assert prediction["tau_theory"] > 0

    assert run(out, "predict", "--model", str(out / "model.txt"), "--grid", "--r-values", "1,2",
               "--n-values", "10", "--pe-values", "10,100") == 0
    grid = pd.read_csv(out / "predictions.csv")
    assert len(grid) == 4
    assert (grid["tau_ann"] > 0).all()


def test_train_without_dataset(out):
    assert run(out, "train", "--epochs", "1") == 3


def test_degenerate_dataset_is_a_numerical_failure(out):
    records = [TauRecord(r=1, h=0.1, pe_g=10.0 * (i + 1), mu=0.07 / (i + 1), tau_star=0.01,
                         e_at_star=0.0, seed=i) for i in range(6)]
    save_dataset(records_to_frame(records), out / "dataset.csv")
    assert run(out, "train", "--epochs", "1") == 4


def test_predict_with_missing_model(out):
    assert run(out, "predict", "--model", str(out / "missing.txt"), "--r", "1", "--h", "0.1",
               "--pe-g", "10") == 3


def test_predict_needs_features(out, small_model):
    path = save_model(small_model, out / "model.txt")
    assert run(out, "predict", "--model", str(path), "--r", "1") == 2


def test_unexpected_failure_is_recorded(out, monkeypatch):
    def explode(*args, **kwargs):
        raise np.linalg.LinAlgError("factorization broke")

    monkeypatch.setattr(Evaluator, "evaluate_single", explode)
    assert run(out, "solve", "val1d", "--n", "4", "--mu", "0.1") == 4
    meta = manifest(out, "solve")
    assert meta["status"] == "failed"
    assert meta["error"] == "LinAlgError: factorization broke"
