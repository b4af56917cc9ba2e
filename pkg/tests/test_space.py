import numpy as np
import pytest

from core.errors import UnsupportedDegreeError
from fem import DiscreteSolution, LagrangeElement, build_interval_mesh, build_space, build_unit_square_mesh
from fem.quadrature import reference_rule


@pytest.mark.parametrize("dim", [1, 2])
@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_basis_is_nodal(dim, r):
    element = LagrangeElement(dim, r)
    np.testing.assert_allclose(element.values(element.nodes), np.eye(element.n_local), atol=1e-12)


@pytest.mark.parametrize("dim", [1, 2])
@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_partition_of_unity(dim, r):
    element = LagrangeElement(dim, r)
    points, _ = reference_rule(dim, 2 * r + 2)
    np.testing.assert_allclose(element.values(points).sum(axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(element.gradients(points).sum(axis=1), 0.0, atol=1e-10)
    np.testing.assert_allclose(element.hessians(points).sum(axis=1), 0.0, atol=1e-8)


def test_local_node_counts():
    for r in range(1, 5):
        assert LagrangeElement(1, r).n_local == r + 1
        assert LagrangeElement(2, r).n_local == (r + 1) * (r + 2) // 2


def test_hessian_of_quadratic_basis():
    element = LagrangeElement(1, 2)
    # phi for the node at 1/2 is 4 x (1 - x)
    mid = int(np.flatnonzero(np.isclose(element.nodes[:, 0], 0.5))[0])
    hess = element.hessians(np.array([[0.3]]))
    assert hess[0, mid, 0, 0] == pytest.approx(-8.0)


@pytest.mark.parametrize("r", [0, 5, 2.5])
def test_unsupported_degree(r):
    with pytest.raises(UnsupportedDegreeError):
        build_space(build_interval_mesh(4), r)


@pytest.mark.parametrize("r, expected", [(1, 21), (3, 61)])
def test_interval_dof_counts(r, expected):
    assert build_space(build_interval_mesh(20), r).n_dofs == expected


def _unique_edges(mesh):
    edges = set()
    for cell in mesh.cells:
        for a in range(3):
            for b in range(a + 1, 3):
                edges.add(tuple(sorted((int(cell[a]), int(cell[b])))))
    return edges


def test_quadratic_dofs_are_vertices_plus_edges():
    mesh = build_unit_square_mesh(10)
    space = build_space(mesh, 2)
    assert len(_unique_edges(mesh)) == 320
    assert space.n_dofs == mesh.n_vertices + 320 == 441


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_square_dof_counts_and_boundary(r):
    n = 3
    space = build_space(build_unit_square_mesh(n), r)
    assert space.n_dofs == (n * r + 1) ** 2
    assert space.boundary_dof_flags.sum() == 4 * n * r
    x, y = space.dof_coords[:, 0], space.dof_coords[:, 1]
    on_boundary = np.isclose(x, 0) | np.isclose(x, 1) | np.isclose(y, 0) | np.isclose(y, 1)
    np.testing.assert_array_equal(space.boundary_dof_flags, on_boundary)


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_cell_dofs_sit_on_their_nodes(r):
    mesh = build_unit_square_mesh(3)
    space = build_space(mesh, r)
    jac = mesh.jacobians()
    origin = mesh.vertices[mesh.cells[:, 0]]
    mapped = origin[:, None, :] + np.einsum("cde,ae->cad", jac, space.element.nodes)
    np.testing.assert_allclose(space.dof_coords[space.cell_dofs], mapped, atol=1e-14)


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_constant_function_is_reproduced(r, rng):
    space = build_space(build_unit_square_mesh(4), r)
    solution = DiscreteSolution(space=space, coefficients=np.ones(space.n_dofs))
    points = rng.uniform(0, 1, size=(50, 2))
    np.testing.assert_allclose(solution.evaluate_many(points), 1.0, atol=1e-12)
