"""
Fine-grid reference solutions for problems without a closed form.

The reference is the unstabilized (tau = 0) linear-element solution on
the n_ref x n_ref structured mesh (h = sqrt(2)/400 by default). Results
are memoized per (problem id, mu, n_ref) and optionally stored as .npz
files so repeated evaluations reuse them.
"""

import logging
import threading
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np

from core.errors import InvalidArgumentError
from fem import DiscreteSolution, build_mesh, build_space, solve_problem
from .benchmarks import ExactSolution, ProblemSpec

logger = logging.getLogger(__name__)

REFERENCE_DEGREE = 1
REFERENCE_TAU = 0.0

_memory: Dict[Tuple[str, float, int], DiscreteSolution] = {}
_lock = threading.Lock()


def _cache_file(cache_dir: Path, problem: ProblemSpec, n_ref: int) -> Path:
    return Path(cache_dir) / f"{problem.problem_id}_mu{problem.mu:.17g}_n{n_ref}_r{REFERENCE_DEGREE}.npz"


def reference_solution(problem: ProblemSpec, n_ref: int = 400,
                       cache_dir: Optional[Path] = None) -> DiscreteSolution:
    """Galerkin r=1 solution of problem on the n_ref mesh, memoized."""
    if n_ref < 1:
        raise InvalidArgumentError(f"Reference divisions must be positive, got {n_ref}")
    key = (problem.problem_id, problem.mu, int(n_ref))
    with _lock:
        cached = _memory.get(key)
    if cached is not None:
        logger.debug("Reference cache hit %s", key)
        return cached

    space = build_space(build_mesh(problem.dim, n_ref), REFERENCE_DEGREE)
    path = _cache_file(cache_dir, problem, n_ref) if cache_dir is not None else None
    solution = None
    if path is not None and path.exists():
        with np.load(path) as stored:
            coefficients = stored["coefficients"]
        if coefficients.shape == (space.n_dofs,):
            logger.debug("Loaded reference from %s", path)
            solution = DiscreteSolution(space=space, coefficients=coefficients, tau_used=REFERENCE_TAU)
    if solution is None:
        logger.info("Computing fine-grid reference for %s (mu=%g, n=%d, %d dofs)",
                    problem.problem_id, problem.mu, n_ref, space.n_dofs)
        solution = solve_problem(problem, space, REFERENCE_TAU)
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            np.savez(path, coefficients=solution.coefficients)

    with _lock:
        _memory.setdefault(key, solution)
        return _memory[key]


def clear_reference_cache() -> None:
    with _lock:
        _memory.clear()


def as_exact(solution: DiscreteSolution) -> ExactSolution:
    """Expose a discrete solution through the ExactSolution interface."""
    dim = solution.space.dim

    def value(points):
        points = np.asarray(points, dtype=float)
        return solution.evaluate_many(points.reshape(-1, dim)).reshape(points.shape[:-1])

    def gradient(points):
        points = np.asarray(points, dtype=float)
        return solution.gradient(points.reshape(-1, dim)).reshape(points.shape)

    return ExactSolution(value=value, gradient=gradient)
