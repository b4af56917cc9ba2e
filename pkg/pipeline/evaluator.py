"""
Evaluation pipeline comparing stabilization parameters on benchmark problems.

For each configuration it:
1. Resolves tau (theoretical, fixed, network prediction, none or optimal)
2. Solves the SUPG problem
3. Computes nodal, L2 and H1 errors against the exact or reference field
4. Optionally samples the solutions along a line
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from core.errors import InvalidArgumentError, UnsupportedMetricError
from core.settings import OptimizerSettings
from fem import DiscreteSolution, build_mesh, build_space, solve_problem
from fem.space import FeSpace
from metrics import ErrorReport, LineSegment, compute_error_report, extract_line, nodal_error
from mlp import MlpModel, load_model, predict_tau
from problems import ExactSolution, ProblemCatalog, ProblemSpec, as_exact, reference_solution
from stabilization import mu_from_peclet, peclet, tau_theory
from .tau_search import (
    SweepConfig,
    TauObjective,
    build_sweep_configs,
    golden_section_log,
    sweep_optimal_tau,
)

logger = logging.getLogger(__name__)

TAU_MODE_KINDS = ("theory", "fixed", "ann", "none", "optimal")

# Pe_g sweep of the unseen-problem studies: 20 log-spaced points in [7, 70710]
DEFAULT_PE_SWEEP = tuple(np.geomspace(7.0, 70710.0, 20))

# (r, n, Pe_h) rows of the training-problem norm table
TEST1_CASES = (
    (1, 10, 2.0), (2, 10, 2.0), (3, 10, 2.0),
    (1, 20, 500.0), (2, 20, 500.0), (3, 20, 500.0),
)

# (r, n, Pe_g) of the reference-solution line comparisons
TEST3_CASES = ((1, 20, 7.0), (3, 10, 707.0))

THETA_GRID = tuple(k * math.pi / 12 for k in range(1, 7))


@dataclass(frozen=True)
class TauMode:
    """How tau is chosen: theory | fixed:<value> | ann:<model path> | none | optimal."""

    kind: str
    value: Optional[float] = None
    model_path: Optional[Path] = None

    @classmethod
    def parse(cls, text: str) -> "TauMode":
        kind, _, arg = text.strip().partition(":")
        if kind not in TAU_MODE_KINDS:
            raise InvalidArgumentError(
                f"Unknown tau mode {text!r} (choose from theory, fixed:<v>, ann:<model>, none, optimal)")
        if kind == "fixed":
            try:
                value = float(arg)
            except ValueError:
                raise InvalidArgumentError(f"fixed tau needs a number, got {arg!r}") from None
            if not (math.isfinite(value) and value >= 0.0):
                raise InvalidArgumentError(f"fixed tau must be finite and >= 0, got {value}")
            return cls(kind=kind, value=value)
        if kind == "ann":
            return cls(kind=kind, model_path=Path(arg) if arg else None)
        if arg:
            raise InvalidArgumentError(f"Tau mode {kind!r} takes no argument")
        return cls(kind=kind)

    @property
    def label(self) -> str:
        return f"fixed:{self.value:g}" if self.kind == "fixed" else self.kind


@dataclass(frozen=True, eq=False)
class EvaluationResult:
    problem: ProblemSpec
    solution: DiscreteSolution
    tau: float
    mode: TauMode
    report: Optional[ErrorReport] = None

    def as_dict(self) -> Dict:
        row = {"problem_id": self.problem.problem_id, "tau_mode": self.mode.label, "tau": self.tau,
               "r": self.solution.space.r, "n": self.solution.space.mesh.n,
               "h": self.solution.space.mesh.h, "mu": self.problem.mu, "theta": self.problem.theta}
        if self.report is not None:
            row.update({k: v for k, v in self.report.as_dict().items() if k not in row})
        return row


class Evaluator:
    """
    Runs the comparison suites.

    Test 1: norm table on the training problem
    Test 2: E(tau) against Pe_g on the constant-forcing problem
    Test 3: line comparisons against a fine-grid reference
    Test 4: E(tau) against Pe_g on the internal-layer problem
    """

    def __init__(
        self,
        model: Optional[MlpModel] = None,
        optimizer: OptimizerSettings = OptimizerSettings(),
        reference_n: int = 400,
        cache_dir: Optional[Path] = None,
        workers: int = 1,
        show_progress: bool = True,
    ):
        """
        Initialize the evaluator.

        Args:
            model: trained network; without it the tau_ann columns are omitted
            optimizer: settings for tau* searches
            reference_n: fine-grid divisions for problems without exact solution
            cache_dir: where fine-grid references are stored
            workers: parallel configurations in sweeps
        """
        self.model = model
        self.optimizer = optimizer
        self.reference_n = reference_n
        self.cache_dir = cache_dir
        self.workers = workers
        self.show_progress = show_progress

    def _predictor(self):
        if self.model is None:
            return None
        model = self.model
        return lambda r, h, pe_g: predict_tau(model, r, h, pe_g)

    def sources(self, include_optimal: bool = False) -> List[TauMode]:
        modes = [TauMode("theory")]
        if self.model is not None:
            modes.append(TauMode("ann"))
        if include_optimal:
            modes.append(TauMode("optimal"))
        return modes

    def exact_for(self, problem: ProblemSpec) -> ExactSolution:
        if problem.exact is not None:
            return problem.exact
        return as_exact(reference_solution(problem, n_ref=self.reference_n, cache_dir=self.cache_dir))

    def resolve_tau(self, mode: TauMode, problem: ProblemSpec, space: FeSpace) -> float:
        h = space.mesh.h
        if mode.kind == "theory":
            return tau_theory(problem.beta_norm, h, problem.mu, space.r)
        if mode.kind == "fixed":
            return mode.value
        if mode.kind == "none":
            return 0.0
        if mode.kind == "ann":
            model = load_model(mode.model_path) if mode.model_path is not None else self.model
            if model is None:
                raise InvalidArgumentError("tau mode 'ann' needs a model (ann:<path> or --model)")
            pe = peclet(problem.beta_norm, h, problem.char_length, problem.mu)
            return predict_tau(model, space.r, h, pe.global_)
        exact = self.exact_for(problem)
        objective = TauObjective(problem, space, exact.value(space.dof_coords))
        result = golden_section_log(objective, self.optimizer.bracket, self.optimizer.tol,
                                    self.optimizer.budget)
        return result.tau_star

    def evaluate_single(self, problem: ProblemSpec, n: int, r: int, mode: TauMode,
                        with_report: bool = True) -> EvaluationResult:
        """
        Solve one problem with one tau choice.

        The error report needs a field with a gradient; it is skipped when
        with_report is False.
        """
        space = build_space(build_mesh(problem.dim, n), r)
        tau = self.resolve_tau(mode, problem, space)
        solution = solve_problem(problem, space, tau)
        report = None
        if with_report:
            exact = self.exact_for(problem)
            try:
                report = compute_error_report(solution, exact, problem.problem_id, problem.beta_norm,
                                              problem.mu, problem.char_length)
            except UnsupportedMetricError as e:
                logger.warning("No L2/H1 errors for %s: %s", problem.problem_id, e)
                pe = peclet(problem.beta_norm, space.mesh.h, problem.char_length, problem.mu)
                report = ErrorReport(
                    e_nodal=nodal_error(solution, exact.value(space.dof_coords)), l2=math.nan,
                    h1=math.nan, tau=tau, r=r, h=space.mesh.h,
                    pe_h=pe.local, pe_g=pe.global_,
                    problem_id=problem.problem_id)
        return EvaluationResult(problem=problem, solution=solution, tau=tau, mode=mode, report=report)

    def compare_lines(self, problem: ProblemSpec, n: int, r: int, line: LineSegment,
                      samples: int = 200, modes: Optional[Sequence[TauMode]] = None
                      ) -> Tuple[pd.DataFrame, List[EvaluationResult]]:
        """
        Sample the exact (or reference) field and each tau choice along a line.

        Returns:
            (frame with coordinate columns, 'exact' and one 'u_<mode>' column
            per mode, the evaluation results)
        """
        modes = list(modes) if modes is not None else self.sources()
        frame = None
        results = []
        for mode in modes:
            result = self.evaluate_single(problem, n, r, mode)
            results.append(result)
            extracted = extract_line(result.solution, line, samples)
            if frame is None:
                frame = extracted.drop(columns="value")
                coords = frame.to_numpy(dtype=float)
                frame["exact"] = self.exact_for(problem).value(coords)
            frame[f"u_{mode.label}"] = extracted["value"].to_numpy()
        return frame, results

    def test1(self, cases: Sequence[Tuple[int, int, float]] = TEST1_CASES, samples: int = 200,
              include_optimal: bool = False) -> Tuple[pd.DataFrame, pd.DataFrame]:
        """
        Norm table and line comparisons on the training problem.

        Lines run along x = 1 - h.

        Returns:
            (norms frame: one row per case and tau source, lines frame in long format)
        """
        norm_rows = []
        line_frames = []
        for r, n, pe_h in tqdm(cases, desc="Test 1", disable=not self.show_progress):
            h = ProblemCatalog.mesh_size("train2d", n)
            mu = mu_from_peclet(ProblemCatalog.beta_norm("train2d"), h, pe_h)
            problem = ProblemCatalog.build("train2d", mu)
            line = LineSegment(start=(1.0 - h, 0.0), end=(1.0 - h, 1.0))
            frame, results = self.compare_lines(problem, n, r, line, samples,
                                                self.sources(include_optimal))
            for result in results:
                norm_rows.append(result.as_dict())
            frame.insert(0, "case", f"r{r}_n{n}_peh{pe_h:g}")
            line_frames.append(frame)
        return pd.DataFrame(norm_rows), pd.concat(line_frames, ignore_index=True)

    def test3(self, cases: Sequence[Tuple[int, int, float]] = TEST3_CASES, samples: int = 200
              ) -> Tuple[pd.DataFrame, pd.DataFrame]:
        """Line comparisons along x = 0.5 against the fine-grid reference of the f = 1 problem."""
        error_rows = []
        line_frames = []
        line = LineSegment(start=(0.5, 0.0), end=(0.5, 1.0))
        for r, n, pe_g in tqdm(cases, desc="Test 3", disable=not self.show_progress):
            mu = mu_from_peclet(ProblemCatalog.beta_norm("homog2d"), 1.0, pe_g)
            problem = ProblemCatalog.build("homog2d", mu)
            frame, results = self.compare_lines(problem, n, r, line, samples)
            for result in results:
                error_rows.append(result.as_dict())
            frame.insert(0, "case", f"r{r}_n{n}_peg{pe_g:g}")
            line_frames.append(frame)
        return pd.DataFrame(error_rows), pd.concat(line_frames, ignore_index=True)

    def error_sweep(self, problem_id: str, r_values: Sequence[int], n_values: Sequence[int],
                    pe_values: Sequence[float] = DEFAULT_PE_SWEEP,
                    include_optimal: bool = False) -> pd.DataFrame:
        """E(tau_theory) and E(tau_ann) (and optionally E(tau*)) against Pe_g."""
        configs = build_sweep_configs(problem_id, pe_values, r_values, n_values, pe_kind="global")
        return self._sweep(configs, include_optimal)

    def test2(self, r_values: Sequence[int] = (1, 2, 3), n: int = 10,
              pe_values: Sequence[float] = DEFAULT_PE_SWEEP, include_optimal: bool = False) -> pd.DataFrame:
        return self.error_sweep("forced2d", r_values, [n], pe_values, include_optimal)

    def test4(self, r_values: Sequence[int] = (1, 2, 3), n_values: Sequence[int] = (10, 20),
              pe_values: Sequence[float] = DEFAULT_PE_SWEEP, include_optimal: bool = False) -> pd.DataFrame:
        return self.error_sweep("atan2d", r_values, n_values, pe_values, include_optimal)

    def theta_study(self, thetas: Sequence[float] = THETA_GRID, problem_id: str = "forced2d",
                    pe_g: float = 7071.0, n: int = 20, r: int = 3) -> pd.DataFrame:
        """tau*, tau_theory and tau_ann (with their errors) against the advection angle."""
        configs = build_sweep_configs(problem_id, [pe_g], [r], [n], pe_kind="global", thetas=thetas)
        return self._sweep(configs, include_optimal=True)

    def _sweep(self, configs: Sequence[SweepConfig], include_optimal: bool) -> pd.DataFrame:
        return sweep_optimal_tau(configs, self.optimizer, tau_predictor=self._predictor(),
                                 workers=self.workers, reference_n=self.reference_n,
                                 cache_dir=self.cache_dir, optimize=include_optimal,
                                 show_progress=self.show_progress)
