"""Explicit relationship regularization terms and their analytic gradients.

The relationship kernel is Gaussian, k(a, b) = exp(-||a - b||^2 / sigma_f^2),
evaluated on pairs of output rows. Every energy below is a function of the
kernel matrix K; its gradient in f is assembled from M = dE/dK (taken per
stored entry) through one shared chain rule:

    S = (M + M^T) o K,    dE/df = -(2 / sigma_f^2) (diag(S 1) f - S f)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.spatial.distance import cdist

from ..errors import GraphError
from ..models import KernelMode, LaplacianKind
from .dataset import RelationLabelSet
from .graph import Graph, LaplacianOp, knn_search


@dataclass(frozen=True)
class RelationshipKernel:
    sigma_f_sq: float
    mode: KernelMode = KernelMode.SCALAR

    def __post_init__(self) -> None:
        if not self.sigma_f_sq > 0:
            raise ValueError(f"sigma_f^2 must be positive, got {self.sigma_f_sq}")

    def check_outputs(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f, dtype=np.float64)
        if f.ndim == 1:
            f = f[:, None]
        if self.mode is KernelMode.SCALAR and f.shape[1] != 1:
            raise ValueError("scalar relationship kernel needs a single output column")
        return f


def kernel_value(f_i: np.ndarray, f_j: np.ndarray, kernel: RelationshipKernel) -> float:
    diff = np.atleast_1d(np.asarray(f_i, dtype=np.float64) - np.asarray(f_j, dtype=np.float64))
    return float(np.exp(-np.dot(diff, diff) / kernel.sigma_f_sq))


def adaptive_sigma_f(f: np.ndarray) -> float:
    """Mean squared distance over all unordered pairs of output rows (1.0 if zero)."""
    f = np.asarray(f, dtype=np.float64)
    if f.ndim == 1:
        f = f[:, None]
    u = f.shape[0]
    centered = f - f.mean(axis=0)
    value = 2.0 * float(np.sum(centered**2)) / (u - 1)
    return value if value > 0 else 1.0


@dataclass(frozen=True)
class SparsityPattern:
    """Relationship neighbourhoods N_K and the mirrored indicator g (diagonal included)."""

    neighbors: np.ndarray
    g: sparse.csr_matrix

    @property
    def bound(self) -> int:
        return int(self.neighbors.shape[1])

    @property
    def u(self) -> int:
        return int(self.g.shape[0])

    @classmethod
    def full(cls, u: int) -> SparsityPattern:
        """g = 1 everywhere; equivalent to an infinite neighbourhood."""
        neighbors = np.array(
            [[j for j in range(u) if j != i] for i in range(u)], dtype=np.int64
        ).reshape(u, u - 1)
        return cls(neighbors=neighbors, g=sparse.csr_matrix(np.ones((u, u))))


def sparsity_pattern(points: np.ndarray, n_k: int) -> SparsityPattern:
    """N_K(i) = the n_k nearest input-space neighbours of i; g mirrors them."""
    points = np.asarray(points, dtype=np.float64)
    u = points.shape[0]
    if n_k >= u:
        return SparsityPattern.full(u)
    neighbors, _ = knn_search(points, n_k)
    rows = np.repeat(np.arange(u), n_k)
    directed = sparse.csr_matrix(
        (np.ones(rows.size), (rows, neighbors.ravel())), shape=(u, u)
    )
    g = directed.maximum(directed.T) + sparse.identity(u, format="csr")
    g = sparse.csr_matrix(g)
    g.data[:] = 1.0
    g.sort_indices()
    return SparsityPattern(neighbors=neighbors, g=g)


@dataclass(frozen=True)
class KMatrix:
    """Relationship values K_ij, dense or restricted to a sparsity pattern."""

    values: np.ndarray | sparse.csr_matrix
    pattern: SparsityPattern | None = None

    @property
    def is_dense(self) -> bool:
        return self.pattern is None

    def toarray(self) -> np.ndarray:
        if isinstance(self.values, np.ndarray):
            return self.values
        return self.values.toarray()


def _pattern_values(
    f: np.ndarray, kernel: RelationshipKernel, rows: np.ndarray, cols: np.ndarray
) -> np.ndarray:
    diff = f[rows] - f[cols]
    return np.exp(-np.sum(diff * diff, axis=1) / kernel.sigma_f_sq)


def kernel_matrix(
    f: np.ndarray, kernel: RelationshipKernel, pattern: SparsityPattern | None = None
) -> KMatrix:
    f = kernel.check_outputs(f)
    if pattern is None:
        sq = cdist(f, f, metric="sqeuclidean")
        values = np.exp(-sq / kernel.sigma_f_sq)
        np.fill_diagonal(values, 1.0)
        return KMatrix(values=values)
    coo = pattern.g.tocoo()
    data = _pattern_values(f, kernel, coo.row, coo.col)
    values = sparse.csr_matrix((data, (coo.row, coo.col)), shape=pattern.g.shape)
    values.sort_indices()
    return KMatrix(values=values, pattern=pattern)


def _chain_rule(
    f: np.ndarray, kernel: RelationshipKernel, S: np.ndarray | sparse.spmatrix
) -> np.ndarray:
    row_sums = np.asarray(S.sum(axis=1)).reshape(-1, 1)
    return -(2.0 / kernel.sigma_f_sq) * (row_sums * f - np.asarray(S @ f))


def rel_energy(K: KMatrix, op: LaplacianOp) -> float:
    """tr[K^T L^p K] for a dense K."""
    if not K.is_dense:
        raise ValueError("rel_energy needs a dense K; use sparse_rel_energy for patterns")
    dense = K.toarray()
    if dense.shape[0] != op.u:
        raise ValueError(f"K has {dense.shape[0]} rows, Laplacian has {op.u}")
    return float(np.sum(dense * op.apply(dense)))


def rel_energy_and_gradient(
    f: np.ndarray, kernel: RelationshipKernel, op: LaplacianOp
) -> tuple[float, np.ndarray]:
    f = kernel.check_outputs(f)
    K = kernel_matrix(f, kernel).toarray()
    GK = op.apply(K)
    energy = float(np.sum(K * GK))
    # dE/dK = 2 G K and G is symmetric, so M + M^T = 2 (GK + KG)
    S = 2.0 * (GK + GK.T) * K
    return energy, _chain_rule(f, kernel, S)


def rel_energy_gradient(f: np.ndarray, kernel: RelationshipKernel, op: LaplacianOp) -> np.ndarray:
    """d tr[K^T L^p K] / df in O(u^2 n) beyond the Laplacian products."""
    return rel_energy_and_gradient(f, kernel, op)[1]


def _values_at(matrix: sparse.spmatrix, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    return np.asarray(sparse.csr_matrix(matrix)[rows, cols]).ravel()


def sparse_rel_energy(
    f: np.ndarray,
    kernel: RelationshipKernel,
    g: Graph,
    pattern: SparsityPattern,
    *,
    kind: LaplacianKind = LaplacianKind.UNNORMALIZED,
) -> tuple[float, np.ndarray]:
    """sum_i sum_jk (a_ij - a_ik)^2 W_jk g_ij g_ik and its gradient.

    a_ij = K_ij s_j with s = 1 (unnormalized) or s = D^-1/2 (symmetric
    normalization). With B = G W and C = A W restricted to the pattern the
    energy is 2 sum (a^2 B - a C) and dE/da = 4 (a B - C).
    """
    f = kernel.check_outputs(f)
    if pattern.u != g.u or f.shape[0] != g.u:
        raise GraphError("pattern, graph and outputs must share dimension u")
    if kind is LaplacianKind.SYMMETRIC:
        if np.any(g.degrees <= 0):
            raise GraphError("normalized sparse energy needs positive degrees")
        scale = 1.0 / np.sqrt(g.degrees)
    else:
        scale = np.ones(g.u)

    coo = pattern.g.tocoo()
    rows, cols = coo.row, coo.col
    k_vals = _pattern_values(f, kernel, rows, cols)
    a_vals = k_vals * scale[cols]
    A = sparse.csr_matrix((a_vals, (rows, cols)), shape=pattern.g.shape)
    B = _values_at(pattern.g @ g.W, rows, cols)
    C = _values_at(A @ g.W, rows, cols)

    energy = float(2.0 * np.sum(a_vals * a_vals * B - a_vals * C))
    m_vals = 4.0 * (a_vals * B - C) * scale[cols]
    M = sparse.csr_matrix((m_vals, (rows, cols)), shape=pattern.g.shape)
    Kp = sparse.csr_matrix((k_vals, (rows, cols)), shape=pattern.g.shape)
    S = (M + M.T).multiply(Kp)
    return energy, _chain_rule(f, kernel, sparse.csr_matrix(S))


def label_energy(
    f: np.ndarray, kernel: RelationshipKernel, labels: RelationLabelSet
) -> tuple[float, np.ndarray]:
    """||(K - T) o Q||_F^2 with Q symmetric: each labeled pair counts twice."""
    f = kernel.check_outputs(f)
    if labels.s_r == 0:
        return 0.0, np.zeros_like(f)
    labels.check_bounds(f.shape[0])
    k_vals = _pattern_values(f, kernel, labels.i, labels.j)
    residual = k_vals - labels.targets
    energy = float(2.0 * np.sum(residual * residual))
    # M_ij = M_ji = 2 (K_ij - T_ij); S_ij = (M_ij + M_ji) K_ij on both entries
    s_vals = 4.0 * residual * k_vals
    u = f.shape[0]
    rows = np.r_[labels.i, labels.j]
    cols = np.r_[labels.j, labels.i]
    S = sparse.csr_matrix((np.r_[s_vals, s_vals], (rows, cols)), shape=(u, u))
    return energy, _chain_rule(f, kernel, S)
