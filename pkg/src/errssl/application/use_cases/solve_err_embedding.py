from __future__ import annotations

import numpy as np
import structlog

from ...domain.dataset import DataSet, RelationLabelSet
from ...domain.energy import EmbeddingObjective
from ...domain.graph import LaplacianOp, laplacian, smallest_eigenvectors
from ...domain.relreg import (
    RelationshipKernel,
    SparsityPattern,
    adaptive_sigma_f,
    sparsity_pattern,
)
from ...errors import GraphError
from ...models import EnergyConfig, KernelMode
from ...utils.cg import Solution, minimize_cg

logger = structlog.get_logger(__name__)


def kernel_for(f: np.ndarray, sigma_f_sq: float | None) -> RelationshipKernel:
    """Relationship kernel matching the output width of f; adaptive bandwidth when unset."""
    f = np.asarray(f)
    width = 1 if f.ndim == 1 else f.shape[1]
    mode = KernelMode.SCALAR if width == 1 else KernelMode.VECTOR
    if sigma_f_sq is None:
        sigma_f_sq = adaptive_sigma_f(f)
    return RelationshipKernel(sigma_f_sq=sigma_f_sq, mode=mode)


class SolveERREmbedding:
    """Spectral target e_2..e_{dim+1} refined by CG on the embedding energy."""

    def __init__(
        self,
        op: LaplacianOp,
        pattern: SparsityPattern | None = None,
        *,
        dense_limit: int = 5000,
    ) -> None:
        count, _ = op.graph.connected_components()
        if count > 1:
            raise GraphError(
                f"graph has {count} connected components; the spectral initialization "
                "is ill-posed, embed each component separately or raise k_N"
            )
        self._op = op
        self._pattern = pattern
        self._dense_limit = dense_limit

    def spectral_target(self, dim: int) -> np.ndarray:
        if dim < 1:
            raise ValueError(f"embedding dimension must be >= 1, got {dim}")
        base = self._op
        if base.p != 1:
            base = laplacian(base.graph, base.kind, p=1)
        return smallest_eigenvectors(base, dim + 1, dense_limit=self._dense_limit)

    def __call__(
        self,
        t_spec: np.ndarray,
        config: EnergyConfig,
        labels: RelationLabelSet,
        kernel: RelationshipKernel | None = None,
    ) -> Solution:
        t_spec = np.asarray(t_spec, dtype=np.float64)
        if kernel is None:
            kernel = kernel_for(t_spec, None)
        labels.check_bounds(self._op.u)
        if config.lambda3 > 0 and labels.s_r == 0:
            logger.debug("solver.embedding_no_labels", lambda3=config.lambda3)
        objective = EmbeddingObjective(
            t_spec=t_spec,
            op=self._op,
            config=config,
            kernel=kernel,
            labels=labels,
            pattern=self._pattern,
        )
        solution = minimize_cg(
            objective,
            t_spec,
            max_steps=config.cg_steps,
            grad_tol=config.grad_tol,
            tol_scale=1.0 + float(np.linalg.norm(t_spec)),
        )
        logger.info(
            "solver.err_embedding_done",
            config_hash=config.config_hash(),
            s_r=labels.s_r,
            initial_energy=solution.energy_trace[0],
            final_energy=solution.energy,
            iterations=solution.iterations_used,
        )
        return solution


def solve_err_embedding(
    ds: DataSet,
    op: LaplacianOp,
    config: EnergyConfig,
    kernel: RelationshipKernel | None,
    labels: RelationLabelSet,
    *,
    dim: int = 2,
    dense_limit: int = 5000,
) -> Solution:
    """Embed ds into `dim` coordinates; a sparsity bound in config restricts K to N_K."""
    if ds.u != op.u:
        raise ValueError(f"dataset has {ds.u} points, Laplacian has {op.u}")
    pattern = sparsity_pattern(ds.points, config.sparsity) if config.sparsity else None
    use_case = SolveERREmbedding(op, pattern, dense_limit=dense_limit)
    return use_case(use_case.spectral_target(dim), config, labels, kernel)
