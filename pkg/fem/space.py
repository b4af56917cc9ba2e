"""
Continuous Lagrange finite element spaces on structured meshes.

Every Lagrange node of a degree-r space on an n-division mesh lies on the
lattice of spacing 1/(n r). Global dofs are numbered by lattice position
(lexicographic, x fastest), which identifies nodes shared by neighbouring
cells without any search.
"""

from dataclasses import dataclass, field

import numpy as np

from core.errors import InvalidArgumentError
from .lagrange import LagrangeElement, check_degree, reference_element
from .mesh import Mesh


@dataclass(frozen=True, eq=False)
class FeSpace:
    """
    Degree-r continuous Lagrange space.

    Attributes:
        mesh: underlying mesh
        r: polynomial degree
        dof_coords: (n_dofs, dim) node coordinates
        cell_dofs: (n_cells, n_local) global dof index of each local node
        boundary_dof_flags: (n_dofs,) boolean mask of dofs on the boundary
    """

    mesh: Mesh
    r: int
    dof_coords: np.ndarray
    cell_dofs: np.ndarray
    boundary_dof_flags: np.ndarray
    element: LagrangeElement = field(repr=False)

    @property
    def dim(self) -> int:
        return self.mesh.dim

    @property
    def n_dofs(self) -> int:
        return self.dof_coords.shape[0]

    def boundary_dofs(self) -> np.ndarray:
        return np.flatnonzero(self.boundary_dof_flags)

    def interior_dofs(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary_dof_flags)


def build_space(mesh: Mesh, r: int) -> FeSpace:
    """Conforming degree-r Lagrange space over a structured mesh."""
    r = check_degree(r)
    element = reference_element(mesh.dim, r)
    n = mesh.n
    size = n * r

    grid = np.rint(mesh.vertices * n).astype(np.int64)
    corners = grid[mesh.cells]
    origin = corners[:, 0, :]
    edges = corners[:, 1:, :] - origin[:, None, :]
    # lattice[c, a, :] = r * origin + sum_k local[a, k] * edges[c, k, :]
    lattice = r * origin[:, None, :] + np.einsum("ak,ckd->cad", element.lattice, edges)

    if mesh.dim == 1:
        cell_dofs = lattice[:, :, 0]
        idx = np.arange(size + 1)
        dof_coords = (idx / size).reshape(-1, 1)
        boundary = (idx == 0) | (idx == size)
    elif mesh.dim == 2:
        cell_dofs = lattice[:, :, 1] * (size + 1) + lattice[:, :, 0]
        jj, ii = np.divmod(np.arange((size + 1) ** 2), size + 1)
        dof_coords = np.column_stack([ii / size, jj / size])
        boundary = (ii == 0) | (ii == size) | (jj == 0) | (jj == size)
    else:
        raise InvalidArgumentError(f"Unsupported dimension: {mesh.dim}")

    used = np.zeros(dof_coords.shape[0], dtype=bool)
    used[cell_dofs.ravel()] = True
    if not used.all():
        raise InvalidArgumentError("Mesh does not cover the structured node lattice")

    return FeSpace(mesh=mesh, r=r, dof_coords=dof_coords, cell_dofs=cell_dofs.astype(np.int64),
                   boundary_dof_flags=boundary, element=element)
