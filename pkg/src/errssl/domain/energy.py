"""Assembled objectives for classification and embedding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..models import EnergyConfig
from .dataset import RelationLabelSet
from .graph import LaplacianOp
from .relreg import (
    RelationshipKernel,
    SparsityPattern,
    label_energy,
    rel_energy_and_gradient,
    sparse_rel_energy,
)


def _relationship_term(
    f: np.ndarray,
    op: LaplacianOp,
    kernel: RelationshipKernel,
    pattern: SparsityPattern | None,
) -> tuple[float, np.ndarray]:
    if pattern is None:
        return rel_energy_and_gradient(f, kernel, op)
    if op.p != 1:
        raise ConfigError(
            "relationship sparsity requires p = 1: powers of a sparse Laplacian "
            "tend to produce a denser matrix"
        )
    return sparse_rel_energy(f, kernel, op.graph, pattern, kind=op.kind)


@dataclass(frozen=True)
class ClassificationObjective:
    """(f - t)^T H (f - t) + lambda1 tr[f^T G f] + lambda2 tr[K^T G K]."""

    t: np.ndarray
    h: np.ndarray
    op: LaplacianOp
    config: EnergyConfig
    kernel: RelationshipKernel
    pattern: SparsityPattern | None = None

    def value_and_gradient(self, f: np.ndarray) -> tuple[float, np.ndarray]:
        f = np.asarray(f, dtype=np.float64).reshape(self.t.shape)
        residual = self.h[:, None] * (f - self.t)
        energy = float(np.sum(residual * (f - self.t)))
        grad = 2.0 * residual
        if self.config.lambda1 > 0:
            Gf = self.op.apply(f)
            energy += self.config.lambda1 * float(np.sum(f * Gf))
            grad = grad + 2.0 * self.config.lambda1 * Gf
        if self.config.lambda2 > 0:
            value, rel_grad = _relationship_term(f, self.op, self.kernel, self.pattern)
            energy += self.config.lambda2 * value
            grad = grad + self.config.lambda2 * rel_grad
        return energy, grad


@dataclass(frozen=True)
class EmbeddingObjective:
    """||f - t||^2 + lambda1 tr[f^T G f] + lambda2 tr[K^T G K] + lambda3 ||(K - T) o Q||^2."""

    t_spec: np.ndarray
    op: LaplacianOp
    config: EnergyConfig
    kernel: RelationshipKernel
    labels: RelationLabelSet
    pattern: SparsityPattern | None = None

    def value_and_gradient(self, f: np.ndarray) -> tuple[float, np.ndarray]:
        f = np.asarray(f, dtype=np.float64).reshape(self.t_spec.shape)
        diff = f - self.t_spec
        energy = float(np.sum(diff * diff))
        grad = 2.0 * diff
        if self.config.lambda1 > 0:
            Gf = self.op.apply(f)
            energy += self.config.lambda1 * float(np.sum(f * Gf))
            grad = grad + 2.0 * self.config.lambda1 * Gf
        if self.config.lambda2 > 0:
            value, rel_grad = _relationship_term(f, self.op, self.kernel, self.pattern)
            energy += self.config.lambda2 * value
            grad = grad + self.config.lambda2 * rel_grad
        if self.config.lambda3 > 0 and self.labels.s_r:
            value, lab_grad = label_energy(f, self.kernel, self.labels)
            energy += self.config.lambda3 * value
            grad = grad + self.config.lambda3 * lab_grad
        return energy, grad


def classification_energy(
    f: np.ndarray,
    t: np.ndarray,
    h: np.ndarray,
    op: LaplacianOp,
    config: EnergyConfig,
    kernel: RelationshipKernel,
    pattern: SparsityPattern | None = None,
) -> tuple[float, np.ndarray]:
    return ClassificationObjective(t, h, op, config, kernel, pattern).value_and_gradient(f)


def embedding_energy(
    f: np.ndarray,
    t_spec: np.ndarray,
    op: LaplacianOp,
    config: EnergyConfig,
    kernel: RelationshipKernel,
    labels: RelationLabelSet,
    pattern: SparsityPattern | None = None,
) -> tuple[float, np.ndarray]:
    return EmbeddingObjective(t_spec, op, config, kernel, labels, pattern).value_and_gradient(f)
