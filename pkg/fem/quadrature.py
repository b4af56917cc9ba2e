"""
Quadrature rules on the reference interval [0, 1] and the reference
triangle with vertices (0,0), (1,0), (0,1).

The triangle rule is the collapsed (Duffy) product of a Gauss-Jacobi
rule with weight (1 - u) and a Gauss-Legendre rule:

    x = u,  y = v (1 - u),  dx dy = (1 - u) du dv

With m points per direction the rule integrates every polynomial of
total degree 2m - 1 exactly.
"""

from functools import lru_cache
from typing import Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

from core.errors import InvalidArgumentError


def points_for_degree(degree: int) -> int:
    if degree < 0:
        raise InvalidArgumentError(f"Quadrature degree must be >= 0, got {degree}")
    return degree // 2 + 1


@lru_cache(maxsize=None)
def interval_rule(degree: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre points (m, 1) and weights (m,) on [0, 1]."""
    m = points_for_degree(degree)
    t, w = leggauss(m)
    points = (0.5 * (t + 1.0)).reshape(-1, 1)
    points.setflags(write=False)
    weights = 0.5 * w
    weights.setflags(write=False)
    return points, weights


@lru_cache(maxsize=None)
def triangle_rule(degree: int) -> Tuple[np.ndarray, np.ndarray]:
    """Collapsed Gauss points (m*m, 2) and weights (m*m,) on the reference triangle."""
    m = points_for_degree(degree)
    t, wt = roots_jacobi(m, 1.0, 0.0)
    s, ws = leggauss(m)
    u = 0.5 * (t + 1.0)
    v = 0.5 * (s + 1.0)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    points = np.column_stack([uu.ravel(), (vv * (1.0 - uu)).ravel()])
    weights = np.outer(0.25 * wt, 0.5 * ws).ravel()
    points.setflags(write=False)
    weights.setflags(write=False)
    return points, weights


def reference_rule(dim: int, degree: int) -> Tuple[np.ndarray, np.ndarray]:
    if dim == 1:
        return interval_rule(degree)
    if dim == 2:
        return triangle_rule(degree)
    raise InvalidArgumentError(f"Unsupported dimension: {dim}")
