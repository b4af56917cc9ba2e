"""
Search for the stabilization parameter minimizing the nodal error E(tau).

The search is a golden-section search on log10(tau). Probes whose solve
fails count as +inf; the search only fails when every probe does.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from core.errors import InvalidArgumentError, NumericalError, OptimizationError, SupgError
from core.settings import OptimizerSettings
from fem import Mesh, SupgOperator, build_mesh, build_space, solve_problem
from fem.space import FeSpace
from metrics import nodal_error
from problems import ProblemCatalog, ProblemSpec, reference_solution
from stabilization import mu_from_peclet, peclet, tau_theory

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2

TauPredictor = Callable[[int, float, float], float]


@dataclass(frozen=True)
class TauOptResult:
    tau_star: float
    e_at_star: float
    evaluations: int
    bracket: Tuple[float, float]
    converged: bool
    failed_probes: int = 0

    def as_dict(self) -> Dict:
        out = asdict(self)
        out["bracket"] = list(self.bracket)
        return out


class TauObjective:
    """
    E(tau) for one problem on one space.

    The Galerkin and SUPG parts are assembled once; each call recombines,
    factorizes and compares nodal values with the exact (or reference) field.
    """

    def __init__(self, problem: ProblemSpec, space: FeSpace,
                 target_values: Optional[np.ndarray] = None):
        self.problem = problem
        self.space = space
        if target_values is None:
            if problem.exact is None:
                raise InvalidArgumentError(
                    f"Problem {problem.problem_id} has no exact solution; pass reference values")
            target_values = problem.exact.value(space.dof_coords)
        self.target_values = np.asarray(target_values, dtype=float)
        self.operator = SupgOperator(problem, space)

    def solution(self, tau: float):
        return solve_problem(self.problem, self.space, tau, operator=self.operator)

    def __call__(self, tau: float) -> float:
        return nodal_error(self.solution(tau), self.target_values)


def golden_section_log(objective: Callable[[float], float], bracket: Tuple[float, float],
                       tol: float = 1e-3, budget: int = 200) -> TauOptResult:
    """
    Golden-section search for a minimum of objective(tau) over log10(tau).

    Given an objective with a single local minimum inside the bracket,
    shrinks the log10 bracket until its width is <= tol or the evaluation
    budget is spent, and returns the midpoint (or an already probed point
    if that one is strictly better, endpoints included).
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not 0.0 < lo < hi:
        raise InvalidArgumentError(f"Invalid bracket {bracket}: need 0 < lo < hi")
    if budget < 5:
        raise InvalidArgumentError(f"Budget {budget} too small (need >= 5)")

    evaluations = 0
    failures = 0
    best_s, best_y = None, math.inf

    def probe(s: float) -> float:
        nonlocal evaluations, failures, best_s, best_y
        evaluations += 1
        try:
            y = float(objective(10.0 ** s))
        except NumericalError as e:
            logger.warning("E(tau=%.3e) failed: %s", 10.0 ** s, e)
            y = math.inf
        if not math.isfinite(y):
            failures += 1
            y = math.inf
        if y < best_y:
            best_s, best_y = s, y
        return y

    a, b = math.log10(lo), math.log10(hi)
    probe(a)
    probe(b)
    width = b - a
    c = a + INV_PHI_SQUARE * width
    d = a + INV_PHI * width
    yc = probe(c)
    yd = probe(d)

    while (b - a) > tol and evaluations < budget - 1:
        if yc < yd:
            b = d
            d = c
            yd = yc
            c = a + INV_PHI_SQUARE * (b - a)
            yc = probe(c)
        else:
            a = c
            c = d
            yc = yd
            d = a + INV_PHI * (b - a)
            yd = probe(d)

    converged = (b - a) <= tol
    mid = 0.5 * (a + b)
    y_mid = probe(mid)
    if best_s is None:
        raise OptimizationError(f"E(tau) is non-finite at every probe in {bracket}")
    if y_mid <= best_y:
        best_s, best_y = mid, y_mid
    if failures:
        logger.warning("%d of %d probes failed during tau search", failures, evaluations)
    return TauOptResult(tau_star=10.0 ** best_s, e_at_star=best_y, evaluations=evaluations,
                        bracket=(lo, hi), converged=converged, failed_probes=failures)


def find_optimal_tau(problem: ProblemSpec, mesh: Mesh, r: int,
                     bracket: Tuple[float, float] = (1e-8, 1e2), tol: float = 1e-3,
                     budget: int = 200, target_values: Optional[np.ndarray] = None) -> TauOptResult:
    """Minimize E(tau) for problem on mesh with degree-r elements."""
    objective = TauObjective(problem, build_space(mesh, r), target_values)
    return golden_section_log(objective, bracket, tol, budget)


@dataclass(frozen=True)
class SweepConfig:
    problem_id: str
    n: int
    r: int
    mu: float
    theta: Optional[float] = None


def build_sweep_configs(problem_id: str, pe_values: Iterable[float], r_values: Sequence[int],
                        n_values: Sequence[int], pe_kind: str = "global",
                        thetas: Optional[Sequence[float]] = None) -> List[SweepConfig]:
    """
    Cartesian grid of configurations; Péclet values are converted to mu.

    Args:
        pe_kind: "local" (Pe_h on each mesh) or "global" (Pe_g with L = 1)
        thetas: optional advection angles (radians) at |beta| = sqrt(2)
    """
    pe_values = list(pe_values)
    if not pe_values or not r_values or not n_values:
        raise InvalidArgumentError("Sweep grids must be nonempty")
    if pe_kind not in ("local", "global"):
        raise InvalidArgumentError(f"pe_kind must be 'local' or 'global', got {pe_kind!r}")
    beta_norm = ProblemCatalog.beta_norm(problem_id)
    angles = list(thetas) if thetas is not None else [None]
    configs = []
    for theta in angles:
        for n in n_values:
            length = ProblemCatalog.mesh_size(problem_id, n) if pe_kind == "local" else 1.0
            for r in r_values:
                for pe in pe_values:
                    mu = mu_from_peclet(beta_norm, length, float(pe))
                    configs.append(SweepConfig(problem_id=problem_id, n=int(n), r=int(r), mu=mu, theta=theta))
    return configs


def target_values_for(problem: ProblemSpec, space: FeSpace, reference_n: int = 400,
                      cache_dir=None) -> np.ndarray:
    """Exact nodal values, or fine-grid reference values for problems without a closed form."""
    if problem.exact is not None:
        return problem.exact.value(space.dof_coords)
    reference = reference_solution(problem, n_ref=reference_n, cache_dir=cache_dir)
    return reference.evaluate_many(space.dof_coords)


def run_config(config: SweepConfig, optimizer: OptimizerSettings = OptimizerSettings(),
               tau_predictor: Optional[TauPredictor] = None, reference_n: int = 400,
               cache_dir=None, optimize: bool = True) -> Dict:
    """
    Compare tau values for one configuration.

    E is always reported at the theoretical tau, at the predicted tau when
    a predictor is given, and at the optimizer's tau* when `optimize` is set.
    """
    problem = ProblemCatalog.build(config.problem_id, config.mu, theta=config.theta)
    mesh = build_mesh(problem.dim, config.n)
    space = build_space(mesh, config.r)
    objective = TauObjective(problem, space,
                             target_values_for(problem, space, reference_n, cache_dir))
    beta_norm = problem.beta_norm
    tau_th = tau_theory(beta_norm, mesh.h, problem.mu, config.r)
    row = {
        "problem_id": config.problem_id,
        "theta": config.theta,
        "r": config.r,
        "n": config.n,
        "h": mesh.h,
        "mu": problem.mu,
        **peclet(beta_norm, mesh.h, problem.char_length, problem.mu).as_dict(),
        "tau_theory": tau_th,
        "e_theory": objective(tau_th),
    }
    if optimize:
        result = golden_section_log(objective, optimizer.bracket, optimizer.tol, optimizer.budget)
        row.update({
            "tau_star": result.tau_star,
            "e_star": result.e_at_star,
            "evaluations": result.evaluations,
            "converged": result.converged,
        })
    if tau_predictor is not None:
        tau_ann = float(tau_predictor(config.r, mesh.h, row["pe_g"]))
        row["tau_ann"] = tau_ann
        row["e_ann"] = objective(tau_ann)
    row["error"] = ""
    return row


def _failed_row(config: SweepConfig, error: Exception) -> Dict:
    return {
        "problem_id": config.problem_id,
        "theta": config.theta,
        "r": config.r,
        "n": config.n,
        "h": ProblemCatalog.mesh_size(config.problem_id, config.n),
        "mu": config.mu,
        "error": f"{type(error).__name__}: {error}",
    }


def sweep_optimal_tau(configs: Sequence[SweepConfig],
                      optimizer: OptimizerSettings = OptimizerSettings(),
                      tau_predictor: Optional[TauPredictor] = None, workers: int = 1,
                      reference_n: int = 400, cache_dir=None, optimize: bool = True,
                      show_progress: bool = True) -> pd.DataFrame:
    """
    Run run_config over all configurations.

    Rows keep the order of `configs` whatever the completion order; a
    failing configuration yields a row with its error message.
    """
    if not configs:
        raise InvalidArgumentError("Sweep needs at least one configuration")
    rows: Dict[int, Dict] = {}

    def task(index: int) -> Tuple[int, Dict]:
        config = configs[index]
        try:
            return index, run_config(config, optimizer, tau_predictor, reference_n, cache_dir, optimize)
        except SupgError as e:
            logger.warning("Configuration %s failed: %s", config, e)
            return index, _failed_row(config, e)

    desc = "Optimizing tau" if optimize else "Comparing tau"
    with tqdm(total=len(configs), desc=desc, disable=not show_progress) as pbar:
        if workers <= 1:
            for i in range(len(configs)):
                index, row = task(i)
                rows[index] = row
                pbar.update(1)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                for index, row in pool.map(task, range(len(configs))):
                    rows[index] = row
                    pbar.update(1)

    return pd.DataFrame([rows[i] for i in range(len(configs))])
