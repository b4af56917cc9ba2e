"""
Lagrange finite elements of degree 1..4 on structured meshes of the
unit interval and square, with SUPG assembly and direct sparse solves.
"""

from .mesh import Mesh, build_interval_mesh, build_unit_square_mesh, build_mesh, divisions_for_size
from .quadrature import interval_rule, triangle_rule, reference_rule
from .lagrange import LagrangeElement, reference_element, MAX_DEGREE
from .space import FeSpace, build_space
from .assembly import LinearSystem, SupgOperator, assemble_supg, apply_dirichlet
from .solver import DiscreteSolution, solve, solve_problem

__all__ = [
    'Mesh',
    'build_interval_mesh',
    'build_unit_square_mesh',
    'build_mesh',
    'divisions_for_size',
    'interval_rule',
    'triangle_rule',
    'reference_rule',
    'LagrangeElement',
    'reference_element',
    'MAX_DEGREE',
    'FeSpace',
    'build_space',
    'LinearSystem',
    'SupgOperator',
    'assemble_supg',
    'apply_dirichlet',
    'DiscreteSolution',
    'solve',
    'solve_problem',
]
