"""Ball tree nearest-neighbour search checked against a linear scan."""

import numpy as np
import pytest

from qexgan.conditions.ball_tree import (
    build_ball_tree,
    euclidean_distances,
    nearest,
)
from qexgan.errors import EmptyInputError


def _linear_scan(points: np.ndarray, query: np.ndarray, k: int) -> list[int]:
    distances = euclidean_distances(points, query)
    order = np.lexsort((np.arange(len(points)), distances))
    return order[:k].tolist()


def _configurations() -> list[tuple[int, int, int, int, int]]:
    rng = np.random.default_rng(2024)
    configs = []
    for case in range(20):
        n = int(rng.integers(1, 2001))
        d = (2, 10, 100)[case % 3]
        k = int(rng.integers(1, 11))
        leaf_size = int(rng.choice([1, 4, 16, 40]))
        configs.append((case, n, d, k, leaf_size))
    return configs


@pytest.mark.parametrize("case,n,d,k,leaf_size", _configurations())
def test_matches_linear_scan(case: int, n: int, d: int, k: int, leaf_size: int) -> None:
    rng = np.random.default_rng(case)
    points = rng.normal(size=(n, d))
    tree = build_ball_tree(points, leaf_size)

    for query in rng.normal(size=(5, d)):
        result = nearest(tree, query, k)
        expected = _linear_scan(points, query, min(k, n))
        assert list(result.indices) == expected
        assert list(result.distances) == sorted(result.distances)


def test_ties_break_to_the_lower_index() -> None:
    points = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    tree = build_ball_tree(points, leaf_size=1)

    result = nearest(tree, np.array([1.0, 0.0]), k=2)

    assert result.as_list() == [(1, 0.0), (2, 0.0)]


def test_k_above_size_is_truncated() -> None:
    tree = build_ball_tree(np.eye(3))

    result = nearest(tree, np.zeros(3), k=10)

    assert result.truncated
    assert len(result) == 3


def test_exact_member_is_its_own_nearest_neighbour() -> None:
    points = np.random.default_rng(1).normal(size=(300, 10))
    tree = build_ball_tree(points, leaf_size=8)
    for index in (0, 150, 299):
        assert nearest(tree, points[index]).indices == (index,)


@pytest.mark.parametrize("d", [2, 10])
def test_translating_points_and_query_keeps_the_neighbours(d: int) -> None:
    rng = np.random.default_rng(d)
    points = rng.normal(size=(400, d))
    shift = rng.uniform(-50.0, 50.0, size=d)
    tree = build_ball_tree(points, leaf_size=8)
    shifted = build_ball_tree(points + shift, leaf_size=8)

    for query in rng.normal(size=(10, d)):
        expected = nearest(tree, query, k=5)
        moved = nearest(shifted, query + shift, k=5)
        assert moved.indices == expected.indices
        np.testing.assert_allclose(moved.distances, expected.distances, atol=1e-9)


class TestValidation:
    def test_empty_points(self) -> None:
        with pytest.raises(EmptyInputError):
            build_ball_tree(np.zeros((0, 3)))

    def test_k_must_be_positive(self) -> None:
        with pytest.raises(ValueError):
            nearest(build_ball_tree(np.eye(2)), np.zeros(2), k=0)

    def test_query_dimension_must_match(self) -> None:
        with pytest.raises(ValueError):
            nearest(build_ball_tree(np.eye(2)), np.zeros(3))
