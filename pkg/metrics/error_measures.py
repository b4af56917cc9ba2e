"""
Error measures between a discrete solution and a reference field.

E(tau) sums absolute errors over every Lagrange node of the space
(vertices, edge and interior nodes alike); it approximates an L1 norm
and is the objective of the tau optimization. L2 and H1 errors are
computed by cell quadrature.
"""

import math
from dataclasses import asdict, dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from core.errors import InvalidArgumentError, UnsupportedMetricError
from fem.assembly import cell_geometry, default_quadrature_degree, iter_chunks, physical_points
from fem.quadrature import reference_rule
from fem.solver import DiscreteSolution
from problems.benchmarks import ExactSolution
from stabilization import peclet


@dataclass(frozen=True)
class ErrorReport:
    e_nodal: float
    l2: float
    h1: float
    tau: float
    r: int
    h: float
    pe_h: float
    pe_g: float
    problem_id: str

    def as_dict(self) -> Dict:
        return asdict(self)


def nodal_error(solution: DiscreteSolution, exact_values_at_dofs: np.ndarray) -> float:
    """Sum over all dofs of |u_h(x_k) - u(x_k)|."""
    exact_values_at_dofs = np.asarray(exact_values_at_dofs, dtype=float)
    if exact_values_at_dofs.shape != solution.coefficients.shape:
        raise InvalidArgumentError(
            f"Expected {solution.coefficients.shape[0]} nodal values, got {exact_values_at_dofs.shape}")
    return float(np.sum(np.abs(solution.coefficients - exact_values_at_dofs)))


def norms(solution: DiscreteSolution, exact: Optional[ExactSolution],
          quad_degree: Optional[int] = None) -> Tuple[float, float]:
    """
    L2 and H1 norms of u_h - u.

    Args:
        solution: discrete solution
        exact: field with value and gradient callables
        quad_degree: quadrature degree per cell (default 2r + 2)

    Returns:
        (l2, h1) with h1^2 = l2^2 + |u_h - u|_{H1}^2
    """
    if exact is None or exact.gradient is None:
        raise UnsupportedMetricError("L2/H1 errors need an exact field with a gradient")
    space = solution.space
    degree = quad_degree or default_quadrature_degree(space.r)
    ref_points, weights = reference_rule(space.dim, degree)
    phi = space.element.values(ref_points)
    dphi = space.element.gradients(ref_points)

    l2_sq = 0.0
    semi_sq = 0.0
    for cells in iter_chunks(space.mesh.n_cells):
        origin, jac, inv, det = cell_geometry(space, cells)
        x = physical_points(origin, jac, ref_points)
        coeffs = solution.coefficients[space.cell_dofs[cells]]
        uh = np.einsum("qa,ca->cq", phi, coeffs)
        grad_uh = np.einsum("qae,ced,ca->cqd", dphi, inv, coeffs)
        err = uh - exact.value(x)
        grad_err = grad_uh - exact.gradient(x)
        dx = weights[None, :] * det[:, None]
        l2_sq += float(np.sum(err * err * dx))
        semi_sq += float(np.sum(np.sum(grad_err * grad_err, axis=-1) * dx))

    if not (math.isfinite(l2_sq) and math.isfinite(semi_sq)):
        raise UnsupportedMetricError("Exact field produced non-finite values at quadrature points")
    return math.sqrt(l2_sq), math.sqrt(l2_sq + semi_sq)


def exact_nodal_values(solution: DiscreteSolution, exact: ExactSolution) -> np.ndarray:
    return np.asarray(exact.value(solution.space.dof_coords), dtype=float)


def compute_error_report(solution: DiscreteSolution, exact: ExactSolution, problem_id: str,
                         beta_norm: float, mu: float, char_length: float = 1.0,
                         quad_degree: Optional[int] = None) -> ErrorReport:
    """
    Calculate all error measures in one call.

    Args:
        solution: discrete solution (carries tau and the space)
        exact: exact or reference field
        problem_id: catalog id echoed in the report
        beta_norm, mu, char_length: problem data for the Péclet echo

    Returns:
        ErrorReport with nodal, L2 and H1 errors
    """
    h = solution.space.mesh.h
    pe = peclet(beta_norm, h, char_length, mu)
    e_nodal = nodal_error(solution, exact_nodal_values(solution, exact))
    l2, h1 = norms(solution, exact, quad_degree)
    return ErrorReport(
        e_nodal=e_nodal,
        l2=l2,
        h1=h1,
        tau=solution.tau_used,
        r=solution.space.r,
        h=h,
        pe_h=pe.local,
        pe_g=pe.global_,
        problem_id=problem_id,
    )
