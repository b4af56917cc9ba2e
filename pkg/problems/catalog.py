"""
Catalog of benchmark problems exposed to the command line.

Five problems are available:
1. val1d:    1D boundary layer, f = 0 (nodally exact SUPG for r = 1)
2. train2d:  2D double boundary layer, f = 0 (training problem)
3. forced2d: 2D boundary layers with constant forcing
4. homog2d:  2D, f = 1, homogeneous Dirichlet data, no exact solution
5. atan2d:   2D internal circular layer with non-constant forcing
"""

import math
from typing import Callable, Dict, List, Optional

from core.errors import InvalidArgumentError
from .benchmarks import (
    DEFAULT_BETA_NORM,
    ProblemSpec,
    advection_from_angle,
    make_1d_validation,
    make_2d_atan,
    make_2d_constant_forcing,
    make_2d_homogeneous,
    make_2d_training,
)


class ProblemCatalog:
    """Named problem constructors, all parameterized by the diffusion coefficient."""

    @staticmethod
    def val1d(mu: float, theta: Optional[float] = None) -> ProblemSpec:
        """1D validation problem with beta = 1."""
        if theta is not None:
            raise InvalidArgumentError("val1d has no advection angle")
        return make_1d_validation(mu, beta=1.0)

    @staticmethod
    def train2d(mu: float, theta: Optional[float] = None) -> ProblemSpec:
        """
        Training problem.

        Its exact solution only solves the equation for beta = (1, 1).
        """
        if theta is not None:
            raise InvalidArgumentError("train2d is defined for beta = (1, 1) only")
        return make_2d_training(mu)

    @staticmethod
    def forced2d(mu: float, theta: Optional[float] = None) -> ProblemSpec:
        """Constant-forcing problem; theta rotates beta at |beta| = sqrt(2)."""
        if theta is None:
            return make_2d_constant_forcing(mu)
        return make_2d_constant_forcing(mu, beta=advection_from_angle(theta), theta=theta)

    @staticmethod
    def homog2d(mu: float, theta: Optional[float] = None) -> ProblemSpec:
        if theta is not None:
            raise InvalidArgumentError("homog2d is defined for beta = (1, 1) only")
        return make_2d_homogeneous(mu)

    @staticmethod
    def atan2d(mu: float, theta: Optional[float] = None) -> ProblemSpec:
        if theta is None:
            return make_2d_atan(mu)
        return make_2d_atan(mu, beta=advection_from_angle(theta), theta=theta)

    @classmethod
    def get_all_problems(cls) -> Dict[str, Callable[..., ProblemSpec]]:
        """
        Get all problem constructors as a dictionary.

        Returns:
            Dictionary mapping problem ids to constructors
        """
        return {
            'val1d': cls.val1d,
            'train2d': cls.train2d,
            'forced2d': cls.forced2d,
            'homog2d': cls.homog2d,
            'atan2d': cls.atan2d,
        }

    @classmethod
    def get_problem_ids(cls) -> List[str]:
        """Get list of all problem ids."""
        return list(cls.get_all_problems().keys())

    @classmethod
    def build(cls, problem_id: str, mu: float, theta: Optional[float] = None) -> ProblemSpec:
        problems = cls.get_all_problems()
        if problem_id not in problems:
            raise InvalidArgumentError(
                f"Unknown problem: {problem_id} (choose from {', '.join(problems)})")
        return problems[problem_id](mu, theta=theta)

    @staticmethod
    def dim(problem_id: str) -> int:
        return 1 if problem_id == 'val1d' else 2

    @staticmethod
    def beta_norm(problem_id: str) -> float:
        """|beta| of a catalog problem (independent of mu and theta)."""
        return 1.0 if problem_id == 'val1d' else DEFAULT_BETA_NORM

    @staticmethod
    def mesh_size(problem_id: str, n: int) -> float:
        return 1.0 / n if problem_id == 'val1d' else math.sqrt(2.0) / n
