"""
Structured meshes of the unit interval and the unit square.

The square is divided into an n x n grid whose squares are each split
into two triangles along the bottom-left to top-right diagonal:

    lower triangle  (v00, v10, v11)
    upper triangle  (v00, v11, v01)

Vertex (i, j) of the grid has index j * (n + 1) + i, and square (i, j)
owns cells 2 * (j * n + i) (lower) and 2 * (j * n + i) + 1 (upper).
"""

import math
from dataclasses import dataclass

import numpy as np

from core.errors import InvalidArgumentError


@dataclass(frozen=True, eq=False)
class Mesh:
    """
    Conforming simplicial mesh of (0,1) or (0,1)^2.

    Attributes:
        dim: 1 for intervals, 2 for triangles
        n: number of divisions per coordinate direction
        vertices: (n_vertices, dim) coordinates
        cells: (n_cells, dim + 1) vertex indices
        h: characteristic element size (1/n or sqrt(2)/n)
        boundary_vertex_flags: (n_vertices,) boolean mask
    """

    dim: int
    n: int
    vertices: np.ndarray
    cells: np.ndarray
    h: float
    boundary_vertex_flags: np.ndarray

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_cells(self) -> int:
        return self.cells.shape[0]

    def jacobians(self) -> np.ndarray:
        """Affine-map Jacobians, shape (n_cells, dim, dim); column k is v_{k+1} - v_0."""
        corners = self.vertices[self.cells]
        return np.transpose(corners[:, 1:, :] - corners[:, :1, :], (0, 2, 1))

    def cell_measures(self) -> np.ndarray:
        jac = self.jacobians()
        if self.dim == 1:
            return np.abs(jac[:, 0, 0])
        return 0.5 * np.abs(np.linalg.det(jac))


def _check_divisions(n: int) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidArgumentError(f"Number of divisions must be a positive integer, got {n!r}")
    return int(n)


def build_interval_mesh(n: int) -> Mesh:
    """Uniform mesh of (0, 1) with n elements of length 1/n."""
    n = _check_divisions(n)
    vertices = (np.arange(n + 1, dtype=float) / n).reshape(-1, 1)
    cells = np.column_stack([np.arange(n), np.arange(1, n + 1)]).astype(np.int64)
    boundary = np.zeros(n + 1, dtype=bool)
    boundary[[0, n]] = True
    return Mesh(dim=1, n=n, vertices=vertices, cells=cells, h=1.0 / n,
                boundary_vertex_flags=boundary)


def build_unit_square_mesh(n: int) -> Mesh:
    """Structured triangulation of (0, 1)^2 with 2 n^2 triangles and h = sqrt(2)/n."""
    n = _check_divisions(n)
    ii, jj = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="xy")
    vertices = np.column_stack([ii.ravel() / n, jj.ravel() / n]).astype(float)

    si, sj = np.meshgrid(np.arange(n), np.arange(n), indexing="xy")
    si, sj = si.ravel(), sj.ravel()
    v00 = sj * (n + 1) + si
    v10 = v00 + 1
    v01 = v00 + (n + 1)
    v11 = v01 + 1
    cells = np.empty((2 * n * n, 3), dtype=np.int64)
    cells[0::2] = np.column_stack([v00, v10, v11])
    cells[1::2] = np.column_stack([v00, v11, v01])

    gi, gj = ii.ravel(), jj.ravel()
    boundary = (gi == 0) | (gi == n) | (gj == 0) | (gj == n)
    return Mesh(dim=2, n=n, vertices=vertices, cells=cells, h=math.sqrt(2.0) / n,
                boundary_vertex_flags=boundary)


def build_mesh(dim: int, n: int) -> Mesh:
    if dim == 1:
        return build_interval_mesh(n)
    if dim == 2:
        return build_unit_square_mesh(n)
    raise InvalidArgumentError(f"Unsupported dimension: {dim}")


def divisions_for_size(dim: int, h: float) -> int:
    """Inverse of the structured h(n) relation, e.g. sqrt(2)/20 -> 20 in 2D."""
    scale = 1.0 if dim == 1 else math.sqrt(2.0)
    n = int(round(scale / h))
    if n < 1 or not math.isclose(scale / n, h, rel_tol=1e-9):
        raise InvalidArgumentError(f"h={h} is not a structured mesh size for dim={dim}")
    return n
