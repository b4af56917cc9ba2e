"""
Direct sparse solve and evaluation of discrete solutions.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse.linalg import splu

from core.errors import InvalidArgumentError, OutOfDomainError, SolverError
from .assembly import LinearSystem, SupgOperator
from .space import FeSpace

logger = logging.getLogger(__name__)

DOMAIN_TOL = 1e-12
RESIDUAL_TOL = 1e-10


def solve(system: LinearSystem) -> np.ndarray:
    """Solve the system with a sparse LU factorization."""
    matrix = system.matrix
    if matrix.shape[0] != matrix.shape[1] or matrix.shape[0] != system.rhs.shape[0]:
        raise SolverError(f"Incompatible system shapes {matrix.shape} and {system.rhs.shape}")
    if not np.all(np.isfinite(system.rhs)):
        raise SolverError("Right-hand side contains non-finite values")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            lu = splu(matrix.tocsc())
            x = lu.solve(system.rhs)
    except RuntimeError as e:
        raise SolverError(f"Sparse factorization failed: {e}") from e
    if not np.all(np.isfinite(x)):
        raise SolverError("Solution contains non-finite values")

    scale = np.max(np.abs(system.rhs)) if system.n else 0.0
    residual = np.max(np.abs(matrix @ x - system.rhs)) if system.n else 0.0
    if scale > 0 and residual / scale > RESIDUAL_TOL:
        logger.warning("Relative residual %.3e exceeds %.0e", residual / scale, RESIDUAL_TOL)
    return x


@dataclass(frozen=True, eq=False)
class DiscreteSolution:
    space: FeSpace
    coefficients: np.ndarray
    tau_used: float = 0.0

    def __post_init__(self):
        if self.coefficients.shape != (self.space.n_dofs,):
            raise InvalidArgumentError(
                f"Expected {self.space.n_dofs} coefficients, got {self.coefficients.shape}")

    def _locate(self, points: np.ndarray):
        """Cell index and reference coordinates of each point by grid arithmetic."""
        space = self.space
        mesh = space.mesh
        points = np.asarray(points, dtype=float).reshape(-1, space.dim)
        if not np.all(np.isfinite(points)):
            raise OutOfDomainError("Evaluation points must be finite")
        outside = (points < -DOMAIN_TOL) | (points > 1.0 + DOMAIN_TOL)
        if outside.any():
            bad = points[np.flatnonzero(outside.any(axis=1))[0]]
            raise OutOfDomainError(f"Point {bad.tolist()} lies outside the unit domain")
        points = np.clip(points, 0.0, 1.0)

        n = mesh.n
        scaled = points * n
        square = np.minimum(np.floor(scaled).astype(np.int64), n - 1)
        if space.dim == 1:
            cells = square[:, 0]
        else:
            local = scaled - square
            upper = local[:, 1] > local[:, 0]
            cells = 2 * (square[:, 1] * n + square[:, 0]) + upper.astype(np.int64)

        corners = mesh.vertices[mesh.cells[cells]]
        origin = corners[:, 0, :]
        jac = np.transpose(corners[:, 1:, :] - origin[:, None, :], (0, 2, 1))
        inv = np.linalg.inv(jac)
        ref = np.einsum("pde,pe->pd", inv, points - origin)
        return cells, ref, inv

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        cells, ref, _ = self._locate(points)
        values = self.space.element.values(ref)
        coeffs = self.coefficients[self.space.cell_dofs[cells]]
        return np.sum(values * coeffs, axis=1)

    def evaluate(self, point) -> float:
        """Value of the piecewise polynomial at a single point."""
        return float(self.evaluate_many(np.atleast_1d(np.asarray(point, dtype=float)))[0])

    def gradient(self, points: np.ndarray) -> np.ndarray:
        """Gradient at points, shape (npts, dim)."""
        cells, ref, inv = self._locate(points)
        grads = np.einsum("pae,ped->pad", self.space.element.gradients(ref), inv)
        coeffs = self.coefficients[self.space.cell_dofs[cells]]
        return np.einsum("pad,pa->pd", grads, coeffs)


def solve_problem(problem, space: FeSpace, tau: float,
                  operator: Optional[SupgOperator] = None) -> DiscreteSolution:
    """Assemble (or reuse an assembled operator) and solve for one tau."""
    if operator is None:
        operator = SupgOperator(problem, space)
    coefficients = solve(operator.system(tau))
    return DiscreteSolution(space=space, coefficients=coefficients, tau_used=float(tau))
