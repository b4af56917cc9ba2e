import math

import numpy as np
import pytest

from core.errors import InvalidArgumentError
from fem import build_space, build_unit_square_mesh
from problems import (
    ProblemCatalog,
    advection_from_angle,
    clear_reference_cache,
    make_1d_validation,
    make_2d_atan,
    make_2d_constant_forcing,
    make_2d_homogeneous,
    make_2d_training,
    reference_solution,
)

EXACT_PROBLEMS = ["val1d", "train2d", "forced2d", "atan2d"]


def _pde_residual(problem, points):
    exact = problem.exact
    transport = np.einsum("...d,d->...", exact.gradient(points), problem.beta)
    return -problem.mu * exact.laplacian(points) + transport - problem.forcing(points)


def _fd_gradient(f, point, step=1e-6):
    grad = np.zeros(len(point))
    for d in range(len(point)):
        e = np.zeros(len(point))
        e[d] = step
        grad[d] = (f(point + e) - f(point - e)) / (2 * step)
    return grad


def test_validation_boundary_values():
    problem = make_1d_validation(0.01)
    assert problem.exact.value(np.array([[0.0], [1.0]])).tolist() == pytest.approx([0.0, 1.0], abs=1e-15)


def test_validation_layer_does_not_overflow():
    u = make_1d_validation(0.002).exact.value(np.array([[0.5]]))[0]
    assert u == pytest.approx(math.exp(-250.0) / (1 - math.exp(-500.0)), rel=1e-12)


def test_validation_diffusive_limit():
    u = make_1d_validation(1e6).exact.value(np.array([[0.5]]))[0]
    assert u == pytest.approx(0.5, abs=1e-6)


def test_training_corner_values():
    u = make_2d_training(0.05).exact.value(np.array([[0.0, 0.0], [1.0, 1.0]]))
    np.testing.assert_allclose(u, [0.0, 2.0], atol=1e-14)


def test_training_interior_vanishes_for_small_mu():
    assert make_2d_training(1e-4).exact.value(np.array([0.5, 0.5])) == pytest.approx(0.0, abs=1e-12)


def test_training_gradient_matches_finite_differences():
    problem = make_2d_training(0.01)
    point = np.array([0.9, 0.3])
    fd = _fd_gradient(problem.exact.value, point)
    grad = problem.exact.gradient(point)
    assert np.linalg.norm(fd - grad) <= 1e-6 * np.linalg.norm(grad)


@pytest.mark.parametrize("mu", [1e-5, 1e-3, 0.1, 1.0])
def test_constant_forcing_vanishes_at_origin(mu):
    assert make_2d_constant_forcing(mu).exact.value(np.array([0.0, 0.0])) == pytest.approx(0.0, abs=1e-15)


def test_constant_forcing_interior_value():
    u = make_2d_constant_forcing(1e-4).exact.value(np.array([0.5, 0.5]))
    assert u == pytest.approx(0.5, abs=1e-10)


def test_constant_forcing_solves_the_equation(rng):
    problem = make_2d_constant_forcing(0.01)
    points = rng.uniform(0.05, 0.95, size=(5, 2))
    exact = problem.exact
    lhs = -problem.mu * exact.laplacian(points) + exact.gradient(points).sum(axis=-1)
    np.testing.assert_allclose(lhs, 1.0, atol=1e-8)
    np.testing.assert_array_equal(problem.forcing(points), 1.0)


def test_atan_center_and_circle():
    mu = 0.04
    exact = make_2d_atan(mu).exact
    assert exact.value(np.array([0.5, 0.5])) == pytest.approx(math.atan(1 / 16) / math.sqrt(mu), rel=1e-14)
    angles = np.linspace(0, 2 * math.pi, 17)
    circle = np.column_stack([0.5 + 0.25 * np.cos(angles), 0.5 + 0.25 * np.sin(angles)])
    np.testing.assert_allclose(exact.value(circle), 0.0, atol=1e-14)


def test_atan_forcing_matches_finite_differences():
    problem = make_2d_atan(0.01)
    u = problem.exact.value
    point = np.array([0.7, 0.2])
    step = 1e-4
    ex, ey = np.array([step, 0.0]), np.array([0.0, step])
    lap = (u(point + ex) + u(point - ex) + u(point + ey) + u(point - ey) - 4 * u(point)) / step ** 2
    grad = np.array([(u(point + ex) - u(point - ex)) / (2 * step),
                     (u(point + ey) - u(point - ey)) / (2 * step)])
    fd = -problem.mu * lap + grad @ problem.beta
    assert problem.forcing(point) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("problem_id", EXACT_PROBLEMS)
@pytest.mark.parametrize("mu", [0.01, 0.05])
def test_exact_solutions_satisfy_the_pde(problem_id, mu, rng):
    problem = ProblemCatalog.build(problem_id, mu)
    points = rng.uniform(0.0, 1.0, size=(20, problem.dim))
    residual = _pde_residual(problem, points)
    assert np.all(np.abs(residual) <= 1e-7 * (1 + np.abs(problem.forcing(points))))


@pytest.mark.parametrize("theta", [math.pi / 12, math.pi / 3, math.pi / 2])
@pytest.mark.parametrize("problem_id", ["forced2d", "atan2d"])
def test_rotated_advection_keeps_the_solution_exact(problem_id, theta, rng):
    problem = ProblemCatalog.build(problem_id, 0.05, theta=theta)
    assert problem.beta_norm == pytest.approx(math.sqrt(2), rel=1e-15)
    points = rng.uniform(0.0, 1.0, size=(20, 2))
    residual = _pde_residual(problem, points)
    assert np.all(np.abs(residual) <= 1e-7 * (1 + np.abs(problem.forcing(points))))


@pytest.mark.parametrize("problem_id", EXACT_PROBLEMS)
def test_small_diffusion_is_finite_everywhere(problem_id):
    problem = ProblemCatalog.build(problem_id, 1e-5)
    grid = np.linspace(0.0, 1.0, 41)
    if problem.dim == 1:
        points = grid.reshape(-1, 1)
    else:
        xx, yy = np.meshgrid(grid, grid)
        points = np.column_stack([xx.ravel(), yy.ravel()])
    assert np.all(np.isfinite(problem.exact.value(points)))
    assert np.all(np.isfinite(problem.exact.gradient(points)))


@pytest.mark.parametrize("problem_id", EXACT_PROBLEMS[1:])
def test_dirichlet_data_matches_exact(problem_id):
    problem = ProblemCatalog.build(problem_id, 0.02)
    space = build_space(build_unit_square_mesh(4), 3)
    boundary = space.dof_coords[space.boundary_dofs()]
    np.testing.assert_allclose(problem.dirichlet(boundary), problem.exact.value(boundary), atol=1e-12)


@pytest.mark.parametrize("mu", [0.0, -1.0, math.nan])
def test_invalid_diffusion(mu):
    for build in (make_1d_validation, make_2d_training, make_2d_constant_forcing,
                  make_2d_homogeneous, make_2d_atan):
        with pytest.raises(InvalidArgumentError):
            build(mu)


def test_catalog_ids_and_errors():
    assert ProblemCatalog.get_problem_ids() == ["val1d", "train2d", "forced2d", "homog2d", "atan2d"]
    with pytest.raises(InvalidArgumentError):
        ProblemCatalog.build("nope", 0.1)
    with pytest.raises(InvalidArgumentError):
        ProblemCatalog.build("train2d", 0.1, theta=0.3)
    assert ProblemCatalog.mesh_size("val1d", 20) == 0.05
    assert ProblemCatalog.mesh_size("forced2d", 20) == pytest.approx(math.sqrt(2) / 20)


def test_advection_from_angle():
    np.testing.assert_allclose(advection_from_angle(math.pi / 4), [1.0, 1.0], rtol=1e-15)
    with pytest.raises(InvalidArgumentError):
        advection_from_angle(0.1, magnitude=0.0)


def test_homogeneous_reference_solution(tmp_path):
    clear_reference_cache()
    problem = make_2d_homogeneous(math.sqrt(2) / 14)
    first = reference_solution(problem, n_ref=24, cache_dir=tmp_path)
    space = first.space
    np.testing.assert_array_equal(first.coefficients[space.boundary_dofs()], 0.0)
    assert np.all(first.coefficients[space.interior_dofs()] >= 0.0)
    assert list(tmp_path.glob("*.npz"))

    clear_reference_cache()
    reloaded = reference_solution(problem, n_ref=24, cache_dir=tmp_path)
    clear_reference_cache()
    recomputed = reference_solution(problem, n_ref=24)
    np.testing.assert_array_equal(reloaded.coefficients, first.coefficients)
    np.testing.assert_array_equal(recomputed.coefficients, first.coefficients)
    assert reference_solution(problem, n_ref=24) is recomputed
    clear_reference_cache()


def test_reference_divisions_are_checked():
    with pytest.raises(InvalidArgumentError):
        reference_solution(make_2d_homogeneous(0.1), n_ref=0)
