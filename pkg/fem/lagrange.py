"""
Equispaced Lagrange elements of degree 1..4 on the reference interval
and triangle.

Local nodes are the integer lattice points (i,) with 0 <= i <= r, or
(i, j) with i + j <= r, scaled by 1/r. They are ordered vertices first,
then edge nodes, then interior nodes.
"""

from functools import lru_cache
from itertools import product
from typing import List, Tuple

import numpy as np

from core.errors import UnsupportedDegreeError, InvalidArgumentError

MAX_DEGREE = 4


def check_degree(r: int) -> int:
    if isinstance(r, bool) or int(r) != r or not 1 <= r <= MAX_DEGREE:
        raise UnsupportedDegreeError(f"Lagrange degree must be in 1..{MAX_DEGREE}, got {r!r}")
    return int(r)


def _interval_lattice(r: int) -> List[Tuple[int, ...]]:
    return [(0,), (r,)] + [(k,) for k in range(1, r)]


def _triangle_lattice(r: int) -> List[Tuple[int, ...]]:
    nodes = [(0, 0), (r, 0), (0, r)]
    nodes += [(k, 0) for k in range(1, r)]
    nodes += [(r - k, k) for k in range(1, r)]
    nodes += [(0, r - k) for k in range(1, r)]
    nodes += [(i, j) for j in range(1, r) for i in range(1, r) if i + j < r]
    return nodes


class LagrangeElement:
    """Nodal basis on a reference cell, represented through monomial coefficients."""

    def __init__(self, dim: int, r: int):
        self.dim = dim
        self.r = check_degree(r)
        if dim == 1:
            lattice = _interval_lattice(self.r)
            self.exponents = [(a,) for a in range(self.r + 1)]
        elif dim == 2:
            lattice = _triangle_lattice(self.r)
            self.exponents = [(a, b) for a, b in product(range(self.r + 1), repeat=2)
                              if a + b <= self.r]
        else:
            raise InvalidArgumentError(f"Unsupported dimension: {dim}")
        self.lattice = np.array(lattice, dtype=np.int64)
        self.nodes = self.lattice / float(self.r)
        vandermonde = self._monomials(self.nodes, ())
        self.coefficients = np.linalg.inv(vandermonde)

    @property
    def n_local(self) -> int:
        return len(self.lattice)

    def _monomials(self, points: np.ndarray, derivative: Tuple[int, ...]) -> np.ndarray:
        """Monomials (or a partial derivative of them) at points, shape (npts, n_monomials)."""
        points = np.asarray(points, dtype=float).reshape(-1, self.dim)
        orders = np.zeros(self.dim, dtype=int)
        for axis in derivative:
            orders[axis] += 1
        out = np.ones((points.shape[0], len(self.exponents)))
        for m, exps in enumerate(self.exponents):
            for axis, (e, k) in enumerate(zip(exps, orders)):
                if k > e:
                    out[:, m] = 0.0
                    break
                factor = 1.0
                for step in range(k):
                    factor *= e - step
                out[:, m] *= factor * points[:, axis] ** (e - k)
        return out

    def values(self, points: np.ndarray) -> np.ndarray:
        """Basis values, shape (npts, n_local)."""
        return self._monomials(points, ()) @ self.coefficients

    def gradients(self, points: np.ndarray) -> np.ndarray:
        """Reference gradients, shape (npts, n_local, dim)."""
        return np.stack([self._monomials(points, (d,)) @ self.coefficients
                         for d in range(self.dim)], axis=-1)

    def hessians(self, points: np.ndarray) -> np.ndarray:
        """Reference Hessians, shape (npts, n_local, dim, dim)."""
        rows = []
        for d in range(self.dim):
            rows.append(np.stack([self._monomials(points, (d, e)) @ self.coefficients
                                  for e in range(self.dim)], axis=-1))
        return np.stack(rows, axis=-2)


@lru_cache(maxsize=None)
def reference_element(dim: int, r: int) -> LagrangeElement:
    return LagrangeElement(dim, r)
