import math
from dataclasses import replace

import numpy as np
import pytest

from core.errors import InvalidArgumentError
from core.settings import OptimizerSettings
from metrics import LineSegment
from mlp import predict_tau, save_model
from pipeline import Evaluator, TauMode
from problems import ExactSolution, ProblemCatalog, clear_reference_cache
from stabilization import tau_theory

FAST = OptimizerSettings(bracket=(1e-6, 1.0), tol=1e-2, budget=30)


@pytest.fixture
def evaluator(tmp_path):
    return Evaluator(optimizer=FAST, reference_n=16, cache_dir=tmp_path / "cache", show_progress=False)


@pytest.mark.parametrize("text, kind, value", [
    ("theory", "theory", None),
    ("none", "none", None),
    ("optimal", "optimal", None),
    ("fixed:0.01", "fixed", 0.01),
    (" fixed:0 ", "fixed", 0.0),
])
def test_tau_mode_parse(text, kind, value):
    mode = TauMode.parse(text)
    assert mode.kind == kind
    assert mode.value == value


def test_tau_mode_labels(tmp_path):
    assert TauMode.parse("fixed:0.25").label == "fixed:0.25"
    mode = TauMode.parse(f"ann:{tmp_path / 'model.txt'}")
    assert mode.label == "ann"
    assert mode.model_path == tmp_path / "model.txt"
    assert TauMode.parse("ann").model_path is None


@pytest.mark.parametrize("text", ["galerkin", "fixed:abc", "fixed:-1", "fixed:inf", "theory:2", "none:x"])
def test_tau_mode_parse_errors(text):
    with pytest.raises(InvalidArgumentError):
        TauMode.parse(text)


def test_theoretical_tau(evaluator, validation_problem):
    result = evaluator.evaluate_single(validation_problem, 20, 1, TauMode("theory"))
    assert result.tau == tau_theory(1.0, 1 / 20, validation_problem.mu, 1)
    assert result.report.e_nodal <= 1e-8
    row = result.as_dict()
    assert row["tau_mode"] == "theory"
    assert row["n"] == 20
    assert row["pe_h"] == pytest.approx(12.5, rel=1e-12)


def test_none_and_fixed_modes(evaluator, validation_problem):
    galerkin = evaluator.evaluate_single(validation_problem, 20, 1, TauMode("none"))
    fixed = evaluator.evaluate_single(validation_problem, 20, 1, TauMode.parse("fixed:0.01"))
    assert galerkin.tau == 0.0
    assert fixed.tau == 0.01
    assert galerkin.report.e_nodal > fixed.report.e_nodal


def test_optimal_mode_beats_the_bracket_ends(evaluator):
    problem = ProblemCatalog.build("train2d", 0.01)
    optimal = evaluator.evaluate_single(problem, 4, 2, TauMode("optimal"))
    assert FAST.bracket[0] <= optimal.tau <= FAST.bracket[1]
    for end in FAST.bracket:
        at_end = evaluator.evaluate_single(problem, 4, 2, TauMode("fixed", value=end))
        assert optimal.report.e_nodal <= at_end.report.e_nodal * (1 + 1e-9)


def test_ann_mode_from_model_or_file(small_model, validation_problem, tmp_path):
    pe_g = 1.0 / (2.0 * validation_problem.mu)
    expected = predict_tau(small_model, 2, 1 / 10, pe_g)
    with_model = Evaluator(model=small_model, show_progress=False)
    assert with_model.evaluate_single(validation_problem, 10, 2, TauMode("ann")).tau == pytest.approx(expected)
    path = save_model(small_model, tmp_path / "model.txt")
    from_file = Evaluator(show_progress=False)
    assert from_file.evaluate_single(validation_problem, 10, 2, TauMode.parse(f"ann:{path}")).tau == \
        pytest.approx(expected)


def test_ann_mode_needs_a_model(evaluator, validation_problem):
    with pytest.raises(InvalidArgumentError):
        evaluator.evaluate_single(validation_problem, 10, 1, TauMode("ann"))


def test_report_against_reference(evaluator):
    clear_reference_cache()
    problem = ProblemCatalog.build("homog2d", 0.05)
    result = evaluator.evaluate_single(problem, 4, 1, TauMode("theory"))
    assert result.report.e_nodal >= 0
    assert result.report.h1 >= result.report.l2 >= 0
    clear_reference_cache()


def test_report_without_gradient(evaluator, validation_problem):
    problem = replace(validation_problem, exact=ExactSolution(value=validation_problem.exact.value))
    result = evaluator.evaluate_single(problem, 20, 1, TauMode("theory"))
    assert result.report.e_nodal <= 1e-8
    assert math.isnan(result.report.l2)
    assert math.isnan(result.report.h1)


def test_sources(small_model):
    assert [m.kind for m in Evaluator(show_progress=False).sources()] == ["theory"]
    assert [m.kind for m in Evaluator(model=small_model).sources(include_optimal=True)] == \
        ["theory", "ann", "optimal"]


def test_compare_lines(evaluator, validation_problem):
    modes = [TauMode("theory"), TauMode("none")]
    frame, results = evaluator.compare_lines(validation_problem, 20, 1, LineSegment.parse("x", dim=1),
                                             samples=21, modes=modes)
    assert list(frame.columns) == ["x", "exact", "u_theory", "u_none"]
    assert len(results) == 2
    np.testing.assert_allclose(frame["exact"], validation_problem.exact.value(frame[["x"]].to_numpy()))
    # the theoretical tau is nodally exact in 1D
    np.testing.assert_allclose(frame["u_theory"], frame["exact"], atol=1e-8)


def test_norm_table(evaluator):
    norms, lines = evaluator.test1(cases=((1, 4, 2.0), (2, 4, 2.0)), samples=5)
    assert len(norms) == 2
    assert set(norms["tau_mode"]) == {"theory"}
    assert list(norms["r"]) == [1, 2]
    assert np.all(norms[["e_nodal", "l2", "h1"]].to_numpy() >= 0)
    assert list(lines["case"].unique()) == ["r1_n4_peh2", "r2_n4_peh2"]
    np.testing.assert_allclose(lines["x"], 1.0 - math.sqrt(2) / 4)


def test_reference_line_comparison(evaluator):
    clear_reference_cache()
    errors, lines = evaluator.test3(cases=((1, 4, 7.0),), samples=7)
    assert len(errors) == 1
    assert errors.loc[0, "problem_id"] == "homog2d"
    assert list(lines.columns) == ["case", "x", "y", "exact", "u_theory"]
    np.testing.assert_allclose(lines["exact"].iloc[[0, -1]], 0.0, atol=1e-12)
    clear_reference_cache()


@pytest.mark.slow
def test_error_sweeps(evaluator, small_model):
    evaluator.model = small_model
    sweep = evaluator.test2(r_values=[1], n=4, pe_values=[10.0, 100.0])
    assert list(sweep["pe_g"]) == pytest.approx([10.0, 100.0])
    assert {"e_theory", "tau_ann", "e_ann"} <= set(sweep.columns)
    assert "tau_star" not in sweep.columns
    internal = evaluator.test4(r_values=[1], n_values=[4], pe_values=[10.0])
    assert list(internal["problem_id"]) == ["atan2d"]


@pytest.mark.slow
def test_theta_study(evaluator):
    thetas = [math.pi / 12, math.pi / 4]
    frame = evaluator.theta_study(thetas=thetas, pe_g=100.0, n=4, r=1)
    assert list(frame["theta"]) == pytest.approx(thetas)
    assert (frame["error"] == "").all()
    assert np.all((frame["tau_star"] >= FAST.bracket[0]) & (frame["tau_star"] <= FAST.bracket[1]))
    assert np.all(np.isfinite(frame["e_star"]))


@pytest.mark.slow
@pytest.mark.parametrize("r, n, pe_h, l2, h1", [
    (1, 10, 2.0, 8.97e-2, 2.22),
    (1, 20, 500.0, 1.86e-1, None),
    (3, 20, 500.0, 9.40e-2, None),
])
def test_norm_table_values(evaluator, r, n, pe_h, l2, h1):
    norms, _ = evaluator.test1(cases=((r, n, pe_h),), samples=3)
    assert norms.loc[0, "tau_mode"] == "theory"
    assert norms.loc[0, "pe_h"] == pytest.approx(pe_h, rel=1e-12)
    # regression values known to three significant digits
    assert norms.loc[0, "l2"] == pytest.approx(l2, rel=3e-3)
    if h1 is not None:
        assert norms.loc[0, "h1"] == pytest.approx(h1, rel=3e-3)
