"""
Assembly of the SUPG-stabilized advection-diffusion system

    a(u, v) + tau * sum_K (R(u), T(v))_K = F(v) + tau * sum_K (f, T(v))_K

with
    a(u, v) = (mu grad u, grad v) + (beta . grad u, v)
    R(u)    = -mu lap u + beta . grad u           (strong residual without f)
    T(v)    = 1/2 (div(beta v) + beta . grad v) = beta . grad v + 1/2 div(beta) v

The tau-independent and tau-proportional parts are assembled separately,
so a system for any tau is a linear combination of two stored matrices.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp

from core.errors import AssemblyError, InvalidArgumentError
from .quadrature import reference_rule
from .space import FeSpace

logger = logging.getLogger(__name__)

DEFAULT_CHUNK = 2048


@dataclass(frozen=True, eq=False)
class LinearSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    constrained: bool = True

    @property
    def n(self) -> int:
        return self.rhs.shape[0]


def default_quadrature_degree(r: int) -> int:
    return 2 * r + 2


def cell_geometry(space: FeSpace, cells: slice) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Origins (nc, d), Jacobians (nc, d, d), inverses (nc, d, d) and |det| (nc,)."""
    mesh = space.mesh
    corners = mesh.vertices[mesh.cells[cells]]
    origin = corners[:, 0, :]
    jac = np.transpose(corners[:, 1:, :] - origin[:, None, :], (0, 2, 1))
    inv = np.linalg.inv(jac)
    det = np.abs(np.linalg.det(jac))
    return origin, jac, inv, det


def physical_points(origin: np.ndarray, jac: np.ndarray, ref_points: np.ndarray) -> np.ndarray:
    """Map reference points (nq, d) through each cell's affine map -> (nc, nq, d)."""
    return origin[:, None, :] + np.einsum("cde,qe->cqd", jac, ref_points)


def iter_chunks(n_cells: int, chunk_size: int = DEFAULT_CHUNK):
    for start in range(0, n_cells, chunk_size):
        yield slice(start, min(start + chunk_size, n_cells))


def _first_bad_cell(values: np.ndarray, offset: int) -> Optional[int]:
    bad = ~np.isfinite(values.reshape(values.shape[0], -1)).all(axis=1)
    if bad.any():
        return offset + int(np.flatnonzero(bad)[0])
    return None


class SupgOperator:
    """
    Assembled Galerkin and SUPG parts of one (problem, space) pair.

    Attributes:
        galerkin_matrix, supg_matrix: CSR matrices before Dirichlet rows
        galerkin_rhs, supg_rhs: load vectors before Dirichlet rows
        boundary_values: Dirichlet data at the boundary dofs
    """

    def __init__(self, problem, space: FeSpace, quad_degree: Optional[int] = None,
                 chunk_size: int = DEFAULT_CHUNK):
        if problem.dim != space.dim:
            raise InvalidArgumentError(
                f"Problem dimension {problem.dim} does not match space dimension {space.dim}")
        if not (np.isfinite(problem.mu) and problem.mu > 0):
            raise InvalidArgumentError(f"Diffusion coefficient must be positive, got {problem.mu}")
        self.problem = problem
        self.space = space
        self.quad_degree = quad_degree or default_quadrature_degree(space.r)
        self._assemble(chunk_size)

        boundary = space.boundary_dofs()
        values = np.asarray(problem.dirichlet(space.dof_coords[boundary]), dtype=float)
        if not np.all(np.isfinite(values)):
            raise AssemblyError("Non-finite Dirichlet data")
        self.boundary_values = values

    def _assemble(self, chunk_size: int) -> None:
        space, problem = self.space, self.problem
        element = space.element
        mu = float(problem.mu)
        ref_points, weights = reference_rule(space.dim, self.quad_degree)
        phi = element.values(ref_points)
        dphi = element.gradients(ref_points)
        d2phi = element.hessians(ref_points)

        gal_blocks, supg_blocks = [], []
        gal_rhs = np.zeros(space.n_dofs)
        supg_rhs = np.zeros(space.n_dofs)

        for cells in iter_chunks(space.mesh.n_cells, chunk_size):
            origin, jac, inv, det = cell_geometry(space, cells)
            grad = np.einsum("qae,ced->cqad", dphi, inv)
            metric = np.einsum("ceg,cfg->cef", inv, inv)
            lap = np.einsum("qaef,cef->cqa", d2phi, metric)

            x = physical_points(origin, jac, ref_points)
            beta = np.broadcast_to(problem.advection(x), x.shape)
            div_beta = np.broadcast_to(problem.advection_divergence(x), x.shape[:2])
            f = np.broadcast_to(problem.forcing(x), x.shape[:2])
            for name, data in (("advection", beta), ("advection divergence", div_beta), ("forcing", f)):
                bad = _first_bad_cell(data, cells.start)
                if bad is not None:
                    raise AssemblyError(f"Non-finite {name} evaluation", cell=bad)

            dx = weights[None, :] * det[:, None]
            streamline = np.einsum("cqd,cqad->cqa", beta, grad)
            test = streamline + 0.5 * div_beta[:, :, None] * phi[None, :, :]
            residual = -mu * lap + streamline

            gal = (mu * np.einsum("cqad,cqbd,cq->cab", grad, grad, dx)
                   + np.einsum("qa,cqb,cq->cab", phi, streamline, dx))
            stab = np.einsum("cqa,cqb,cq->cab", test, residual, dx)
            gal_blocks.append(gal)
            supg_blocks.append(stab)

            dofs = space.cell_dofs[cells]
            gal_rhs += np.bincount(dofs.ravel(), weights=np.einsum("cq,qa,cq->ca", f, phi, dx).ravel(),
                                   minlength=space.n_dofs)
            supg_rhs += np.bincount(dofs.ravel(), weights=np.einsum("cq,cqa,cq->ca", f, test, dx).ravel(),
                                    minlength=space.n_dofs)

        self.galerkin_matrix = self._to_sparse(np.concatenate(gal_blocks))
        self.supg_matrix = self._to_sparse(np.concatenate(supg_blocks))
        self.galerkin_rhs = gal_rhs
        self.supg_rhs = supg_rhs
        logger.debug("Assembled %d dofs on %d cells (r=%d, quadrature degree %d)",
                     space.n_dofs, space.mesh.n_cells, space.r, self.quad_degree)

    def _to_sparse(self, local: np.ndarray) -> sp.csr_matrix:
        dofs = self.space.cell_dofs
        n_local = dofs.shape[1]
        rows = np.repeat(dofs[:, :, None], n_local, axis=2)
        cols = np.repeat(dofs[:, None, :], n_local, axis=1)
        n = self.space.n_dofs
        return sp.coo_matrix((local.ravel(), (rows.ravel(), cols.ravel())), shape=(n, n)).tocsr()

    def system(self, tau: float, impose_dirichlet: bool = True) -> LinearSystem:
        """Linear system for stabilization parameter tau (tau = 0 is plain Galerkin)."""
        tau = float(tau)
        if not np.isfinite(tau) or tau < 0:
            raise InvalidArgumentError(f"Stabilization parameter must be finite and >= 0, got {tau}")
        matrix = self.galerkin_matrix + tau * self.supg_matrix
        rhs = self.galerkin_rhs + tau * self.supg_rhs
        if not impose_dirichlet:
            return LinearSystem(matrix=matrix.tocsr(), rhs=rhs, constrained=False)
        matrix, rhs = apply_dirichlet(matrix, rhs, self.space.boundary_dof_flags, self.boundary_values)
        return LinearSystem(matrix=matrix, rhs=rhs, constrained=True)


def apply_dirichlet(matrix: sp.spmatrix, rhs: np.ndarray, boundary_mask: np.ndarray,
                    values: np.ndarray) -> Tuple[sp.csr_matrix, np.ndarray]:
    """Replace constrained rows by identity rows and set rhs to the boundary values."""
    interior = (~boundary_mask).astype(float)
    constrained = sp.diags(interior) @ matrix + sp.diags(boundary_mask.astype(float))
    constrained = constrained.tocsr()
    constrained.eliminate_zeros()
    rhs = rhs.copy()
    rhs[boundary_mask] = values
    return constrained, rhs


def assemble_supg(problem, space: FeSpace, tau: float, quad_degree: Optional[int] = None,
                  impose_dirichlet: bool = True) -> LinearSystem:
    """Assemble the SUPG system of problem on space for one value of tau."""
    return SupgOperator(problem, space, quad_degree=quad_degree).system(tau, impose_dirichlet)
