"""Exact Euclidean ball tree.

Node data lives in flat, pre-allocated arrays. For node ``i`` the children
are ``2 * i + 1`` and ``2 * i + 2``; the points of a node are
``points[idx_array[idx_start[i]:idx_end[i]]]``. Construction splits each
node along the dimension of largest spread at the median, so every leaf
holds between ``leaf_size`` and ``2 * leaf_size`` points (fewer only when
the whole set is smaller than ``leaf_size``).
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass

import numpy as np

from qexgan.errors import EmptyInputError


logger = logging.getLogger(__name__)


def euclidean_distances(points: np.ndarray, query: np.ndarray) -> np.ndarray:
    diff = points - query
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


@dataclass(frozen=True)
class NearestResult:
    indices: tuple[int, ...]
    distances: tuple[float, ...]
    truncated: bool = False

    def __iter__(self):
        return iter(zip(self.indices, self.distances, strict=True))

    def __len__(self) -> int:
        return len(self.indices)

    def as_list(self) -> list[tuple[int, float]]:
        return list(self)


class BallTree:
    """Ball tree over the rows of `points` (n x d)."""

    def __init__(self, points: np.ndarray, leaf_size: int = 16) -> None:
        data = np.array(points, dtype=np.float64, order="C")
        if data.size == 0:
            raise EmptyInputError("cannot build a ball tree on an empty point set")
        if data.ndim != 2:
            raise ValueError("points must be a 2-D array")
        if leaf_size < 1:
            raise ValueError("leaf_size must be at least 1")
        data.setflags(write=False)
        self.points = data
        self.leaf_size = leaf_size

        n_samples = data.shape[0]
        self.n_levels = int(np.log2(max(1, (n_samples - 1) / leaf_size)) + 1)
        self.n_nodes = (2**self.n_levels) - 1

        self.idx_array = np.arange(n_samples)
        self.centroids = np.zeros((self.n_nodes, data.shape[1]))
        self.radii = np.zeros(self.n_nodes)
        self.idx_start = np.zeros(self.n_nodes, dtype=np.int64)
        self.idx_end = np.zeros(self.n_nodes, dtype=np.int64)
        self.is_leaf = np.zeros(self.n_nodes, dtype=bool)
        self._build(0, 0, n_samples)

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.points.shape[1])

    def _build(self, node: int, start: int, end: int) -> None:
        members = self.idx_array[start:end]
        subset = self.points[members]
        centroid = subset.mean(axis=0)
        self.centroids[node] = centroid
        self.radii[node] = euclidean_distances(subset, centroid).max()
        self.idx_start[node] = start
        self.idx_end[node] = end

        first_child = 2 * node + 1
        if first_child >= self.n_nodes or end - start < 2:
            self.is_leaf[node] = True
            return

        spread = subset.max(axis=0) - subset.min(axis=0)
        axis = int(np.argmax(spread))
        # stable sort keeps the split reproducible with tied coordinates
        order = np.argsort(subset[:, axis], kind="stable")
        self.idx_array[start:end] = members[order]
        middle = start + (end - start) // 2
        self._build(first_child, start, middle)
        self._build(first_child + 1, middle, end)

    def _lower_bound(self, node: int, query: np.ndarray) -> float:
        gap = float(np.sqrt(np.sum((query - self.centroids[node]) ** 2)))
        return max(0.0, gap - self.radii[node])


def build_ball_tree(points: np.ndarray, leaf_size: int = 16) -> BallTree:
    return BallTree(points, leaf_size)


def nearest(tree: BallTree, query: np.ndarray, k: int = 1) -> NearestResult:
    """Exact k nearest neighbours, ascending by distance, ties to the lower index."""
    if k < 1:
        raise ValueError("k must be at least 1")
    q = np.asarray(query, dtype=np.float64).ravel()
    if q.shape[0] != tree.dimension:
        raise ValueError(
            f"query dimension {q.shape[0]} does not match tree dimension "
            f"{tree.dimension}"
        )

    truncated = k > tree.size
    if truncated:
        logger.warning("requested %d neighbours from %d points", k, tree.size)
        k = tree.size

    # max-heap of the best k as (-distance, -index)
    best: list[tuple[float, int]] = []

    def worst() -> float:
        return -best[0][0] if len(best) == k else np.inf

    def visit(node: int) -> None:
        bound = tree._lower_bound(node, q)
        limit = worst()
        # slack keeps rounding in the bound from pruning a tied neighbour
        if bound > limit + 1e-12 * max(1.0, limit):
            return
        if tree.is_leaf[node]:
            members = tree.idx_array[tree.idx_start[node] : tree.idx_end[node]]
            distances = euclidean_distances(tree.points[members], q)
            for index, distance in zip(members.tolist(), distances.tolist()):
                item = (-distance, -index)
                if len(best) < k:
                    heapq.heappush(best, item)
                elif item > best[0]:
                    heapq.heapreplace(best, item)
            return
        left, right = 2 * node + 1, 2 * node + 2
        if tree._lower_bound(left, q) <= tree._lower_bound(right, q):
            visit(left)
            visit(right)
        else:
            visit(right)
            visit(left)

    visit(0)
    ranked = sorted((-d, -i) for d, i in best)
    return NearestResult(
        indices=tuple(i for _, i in ranked),
        distances=tuple(d for d, _ in ranked),
        truncated=truncated,
    )
