"""Shared pytest fixtures and configuration."""

from __future__ import annotations

import numpy as np
import pytest
from sklearn.datasets import make_blobs, make_moons

from errssl.domain.dataset import DataSet, RelationLabelSet
from errssl.domain.graph import Graph, graph_from_weights


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def make_graph(rng):
    """Factory for random connected weighted graphs (a weighted path plus random chords)."""

    def _make(u: int, density: float = 0.4) -> Graph:
        W = np.triu(rng.uniform(0.1, 1.0, size=(u, u)) * (rng.random((u, u)) < density), k=1)
        path = np.arange(u - 1)
        W[path, path + 1] = rng.uniform(0.1, 1.0, size=u - 1)
        return graph_from_weights(W + W.T)

    return _make


@pytest.fixture
def make_labels(rng):
    """Factory for random relation-label sets on u points."""

    def _make(u: int, count: int) -> RelationLabelSet:
        pairs: list[tuple[int, int]] = []
        while len(pairs) < count:
            i, j = sorted(int(v) for v in rng.choice(u, size=2, replace=False))
            if (i, j) not in pairs:
                pairs.append((i, j))
        must = np.arange(count) % 2 == 0
        return RelationLabelSet(
            np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs]), must
        )

    return _make


@pytest.fixture
def moons() -> DataSet:
    points, labels = make_moons(n_samples=60, noise=0.08, random_state=0)
    return DataSet(points=points, labels=labels, name="moons")


@pytest.fixture
def blobs() -> DataSet:
    points, labels = make_blobs(
        n_samples=60,
        centers=[[0.0, 0.0], [6.0, 0.0], [3.0, 5.0]],
        cluster_std=1.0,
        random_state=0,
    )
    return DataSet(points=points, labels=labels, name="blobs")
