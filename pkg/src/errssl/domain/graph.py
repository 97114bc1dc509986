"""kNN similarity graphs, graph Laplacians and spectral quantities.

Sparse products go through scipy.sparse in a single thread, so every
reduction runs in CSR row order and repeated calls are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import structlog
from scipy import linalg, sparse
from scipy.sparse import csgraph
from scipy.spatial.distance import cdist

from ..errors import EigensolverError, GraphError
from ..models import LaplacianKind

logger = structlog.get_logger(__name__)

_CHUNK_ROWS = 512


def knn_search(points: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact k nearest neighbours of every point, self excluded.

    Returns (indices, distances), both u x k, sorted by distance with ties
    going to the lowest index.
    """
    points = np.asarray(points, dtype=np.float64)
    u = points.shape[0]
    if not 1 <= k < u:
        raise GraphError(f"neighbourhood size must satisfy 1 <= k < u, got k={k}, u={u}")
    indices = np.empty((u, k), dtype=np.int64)
    distances = np.empty((u, k), dtype=np.float64)
    for start in range(0, u, _CHUNK_ROWS):
        stop = min(start + _CHUNK_ROWS, u)
        block = cdist(points[start:stop], points)
        block[np.arange(stop - start), np.arange(start, stop)] = np.inf
        order = np.argsort(block, axis=1, kind="stable")[:, :k]
        indices[start:stop] = order
        distances[start:stop] = np.take_along_axis(block, order, axis=1)
    return indices, distances


def adaptive_sigma(points: np.ndarray, k_n: int) -> float:
    """Mean over points of the mean Euclidean distance to their k_n neighbours."""
    _, distances = knn_search(points, k_n)
    return float(np.mean(distances.mean(axis=1)))


@dataclass(frozen=True)
class Graph:
    W: sparse.csr_matrix
    degrees: np.ndarray
    k_n: int
    sigma_x_sq: float
    squared_distance: bool = False

    @property
    def u(self) -> int:
        return int(self.W.shape[0])

    def connected_components(self) -> tuple[int, np.ndarray]:
        count, component = csgraph.connected_components(self.W, directed=False)
        return int(count), component.astype(np.int64)


def graph_from_weights(
    W: sparse.spmatrix | np.ndarray, *, k_n: int = 0, sigma_x_sq: float = 1.0
) -> Graph:
    """Wrap an explicit symmetric weight matrix (used by tests and oracles)."""
    W = sparse.csr_matrix(W, dtype=np.float64)
    if W.shape[0] != W.shape[1]:
        raise GraphError("weight matrix must be square")
    if (abs(W - W.T) > 0).nnz:
        raise GraphError("weight matrix must be symmetric")
    W = W.tolil()
    W.setdiag(0.0)
    W = W.tocsr()
    W.eliminate_zeros()
    degrees = np.asarray(W.sum(axis=0)).ravel()
    return Graph(W=W, degrees=degrees, k_n=k_n, sigma_x_sq=sigma_x_sq)


def knn_graph(
    points: np.ndarray,
    k_n: int,
    sigma_x_sq: float | None,
    *,
    squared_distance: bool = False,
) -> Graph:
    """Gaussian-weighted kNN graph, symmetrized by union (elementwise max).

    W_ij = exp(-||x_i - x_j|| / sigma_x_sq), or with the squared distance when
    `squared_distance` is set. `sigma_x_sq=None` selects `adaptive_sigma`.
    """
    points = np.asarray(points, dtype=np.float64)
    u = points.shape[0]
    indices, distances = knn_search(points, k_n)
    if sigma_x_sq is None:
        sigma_x_sq = float(np.mean(distances.mean(axis=1)))
    if not sigma_x_sq > 0:
        raise GraphError(f"sigma_x^2 must be positive, got {sigma_x_sq}")

    scaled = distances**2 if squared_distance else distances
    weights = np.exp(-scaled / sigma_x_sq)
    rows = np.repeat(np.arange(u), k_n)
    directed = sparse.csr_matrix(
        (weights.ravel(), (rows, indices.ravel())), shape=(u, u)
    )
    W = directed.maximum(directed.T).tocsr()
    W.sort_indices()
    degrees = np.asarray(W.sum(axis=0)).ravel()
    logger.debug(
        "graph.built", u=u, k_n=k_n, sigma_x_sq=sigma_x_sq, edges=W.nnz // 2
    )
    return Graph(
        W=W,
        degrees=degrees,
        k_n=k_n,
        sigma_x_sq=float(sigma_x_sq),
        squared_distance=squared_distance,
    )


@dataclass(frozen=True)
class LaplacianOp:
    """L (or its symmetric normalization) raised to power p, applied matrix-free."""

    graph: Graph
    kind: LaplacianKind
    p: int
    L: sparse.csr_matrix

    @property
    def u(self) -> int:
        return self.graph.u

    def apply(self, x: np.ndarray) -> np.ndarray:
        """y = L^p x by p successive sparse products; x may be a vector or a matrix."""
        y = np.asarray(x, dtype=np.float64)
        for _ in range(self.p):
            y = self.L @ y
        return np.asarray(y)

    def quadratic(self, x: np.ndarray) -> float:
        """tr[x^T L^p x]."""
        x = np.asarray(x, dtype=np.float64)
        return float(np.sum(x * self.apply(x)))

    def matrix(self) -> sparse.csr_matrix:
        """Sparse L^p (for direct solves and oracles; densifies quickly with p)."""
        result = self.L
        for _ in range(self.p - 1):
            result = result @ self.L
        return sparse.csr_matrix(result)


def laplacian(g: Graph, kind: LaplacianKind = LaplacianKind.UNNORMALIZED, p: int = 1) -> LaplacianOp:
    if p < 1:
        raise GraphError(f"Laplacian power must be >= 1, got {p}")
    D = sparse.diags(g.degrees)
    if kind is LaplacianKind.UNNORMALIZED:
        L = D - g.W
    else:
        isolated = np.flatnonzero(g.degrees <= 0)
        if isolated.size:
            raise GraphError(
                f"vertex {int(isolated[0])} is isolated (degree 0); "
                "the normalized Laplacian is undefined"
            )
        inv_sqrt = sparse.diags(1.0 / np.sqrt(g.degrees))
        L = sparse.identity(g.u, format="csr") - inv_sqrt @ g.W @ inv_sqrt
    L = sparse.csr_matrix(L)
    L.sort_indices()
    return LaplacianOp(graph=g, kind=kind, p=p, L=L)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    for c in range(vectors.shape[1]):
        column = vectors[:, c]
        nonzero = np.flatnonzero(np.abs(column) > 1e-12 * np.abs(column).max())
        if nonzero.size and column[nonzero[0]] < 0:
            vectors[:, c] = -column
    return vectors


def smallest_eigenpairs(
    op: LaplacianOp, n: int, *, dense_limit: int = 5000
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs 2..n of L in ascending order: (values, u x (n-1) vectors)."""
    if op.p != 1:
        raise GraphError("spectral embedding is defined on L itself (p = 1)")
    if not 2 <= n <= op.u:
        raise GraphError(f"need 2 <= n <= u, got n={n}, u={op.u}")
    if op.u > dense_limit:
        raise GraphError(
            f"u={op.u} exceeds the dense eigensolver limit of {dense_limit} points"
        )
    dense = op.L.toarray()
    try:
        values, vectors = linalg.eigh(dense, subset_by_index=[0, n - 1])
    except linalg.LinAlgError as e:
        raise EigensolverError(f"symmetric eigensolver did not converge: {e}") from e
    residual = float(np.max(np.linalg.norm(dense @ vectors - vectors * values, axis=0)))
    if residual > 1e-8:
        raise EigensolverError("eigenvector residual too large", residual=residual)
    vectors = _fix_signs(vectors[:, 1:].copy())
    return values[1:], vectors


def smallest_eigenvectors(op: LaplacianOp, n: int, *, dense_limit: int = 5000) -> np.ndarray:
    """Columns e_2..e_n of L, unit norm, first nonzero entry positive."""
    return smallest_eigenpairs(op, n, dense_limit=dense_limit)[1]


def ncut(g: Graph, assignment: np.ndarray, *, n_clusters: int | None = None) -> float:
    """Sum over clusters of cut(A, complement) / vol(A)."""
    assignment = np.asarray(assignment, dtype=np.int64)
    if assignment.shape != (g.u,):
        raise GraphError("assignment must have one cluster id per vertex")
    ids, compact = np.unique(assignment, return_inverse=True)
    if n_clusters is not None and (ids.size != n_clusters or ids.min() < 0 or ids.max() >= n_clusters):
        missing = sorted(set(range(n_clusters)) - set(ids.tolist()))
        raise GraphError(f"empty cluster(s): {missing}")
    if np.any(g.degrees <= 0):
        raise GraphError("ncut requires every vertex to have positive degree")
    Z = sparse.csr_matrix(
        (np.ones(g.u), (np.arange(g.u), compact)), shape=(g.u, ids.size)
    )
    within = (Z.T @ g.W @ Z).diagonal()
    volume = np.asarray(Z.T @ g.degrees).ravel()
    cut = volume - within
    return float(np.sum(np.maximum(cut, 0.0) / volume))
