from __future__ import annotations

import numpy as np
import structlog

from ...domain.evaluation import Clustering, kmeans_ncut
from ...domain.graph import Graph

logger = structlog.get_logger(__name__)


class ClusterEmbedding:
    """k-means on embedding rows, keeping the restart with the lowest NCut on the data graph."""

    def __init__(self, graph: Graph, *, restarts: int = 10, plain_init: bool = False) -> None:
        self._graph = graph
        self._restarts = restarts
        self._plain_init = plain_init

    def __call__(self, f: np.ndarray, k: int, seed: int) -> Clustering:
        clustering = kmeans_ncut(
            f,
            k,
            self._graph,
            restarts=self._restarts,
            seed=seed,
            plain_init=self._plain_init,
        )
        logger.debug(
            "eval.clustered", k=k, seed=seed, ncut=clustering.ncut, restart=clustering.restart
        )
        return clustering
