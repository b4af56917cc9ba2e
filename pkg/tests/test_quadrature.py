from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from core.errors import InvalidArgumentError
from fem import interval_rule, reference_rule, triangle_rule
from fem.quadrature import points_for_degree


@pytest.mark.parametrize("degree", range(0, 11))
def test_weights_sum_to_reference_measure(degree):
    _, w_line = interval_rule(degree)
    _, w_tri = triangle_rule(degree)
    assert w_line.sum() == pytest.approx(1.0, rel=1e-14)
    assert w_tri.sum() == pytest.approx(0.5, rel=1e-14)


def test_points_lie_in_reference_cells():
    points, _ = triangle_rule(10)
    assert np.all(points >= 0)
    assert np.all(points.sum(axis=1) <= 1.0)
    line, _ = interval_rule(10)
    assert np.all((line > 0) & (line < 1))


@given(degree=st.integers(min_value=0, max_value=10), data=st.data())
@settings(max_examples=60, deadline=None)
def test_interval_rule_is_exact(degree, data):
    k = data.draw(st.integers(min_value=0, max_value=2 * points_for_degree(degree) - 1))
    points, weights = interval_rule(degree)
    assert np.dot(weights, points[:, 0] ** k) == pytest.approx(1.0 / (k + 1), rel=1e-13)


@given(degree=st.integers(min_value=0, max_value=10), data=st.data())
@settings(max_examples=80, deadline=None)
def test_triangle_rule_is_exact(degree, data):
    top = 2 * points_for_degree(degree) - 1
    a = data.draw(st.integers(min_value=0, max_value=top))
    b = data.draw(st.integers(min_value=0, max_value=top - a))
    points, weights = triangle_rule(degree)
    exact = factorial(a) * factorial(b) / factorial(a + b + 2)
    approx = np.dot(weights, points[:, 0] ** a * points[:, 1] ** b)
    assert approx == pytest.approx(exact, rel=1e-12, abs=1e-16)


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_default_degree_covers_stabilization_terms(r):
    assert 2 * points_for_degree(2 * r + 2) - 1 >= 2 * r + 2


def test_invalid_degree_and_dimension():
    with pytest.raises(InvalidArgumentError):
        points_for_degree(-1)
    with pytest.raises(InvalidArgumentError):
        reference_rule(3, 2)
