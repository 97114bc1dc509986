from __future__ import annotations

import numpy as np

from ...domain.dataset import SupervisionSplit, decode_outputs, target_encoding
from ...domain.graph import LaplacianOp
from ...domain.ports.pipeline import PipelinePort
from ...domain.relreg import RelationshipKernel, SparsityPattern
from ...models import EnergyConfig, KernelMode
from .solve_err_classification import SolveERRClassification
from .solve_irr import SolveIRR


class ClassificationPipeline(PipelinePort):
    """Train IRR (lambda2 = 0) or ERR on the labeled points and decode class ids."""

    def __init__(
        self, op: LaplacianOp, n_outputs: int, pattern: SparsityPattern | None = None
    ) -> None:
        self._op = op
        self._n = n_outputs
        self._pattern = pattern

    def outputs(self, config: EnergyConfig, split: SupervisionSplit) -> np.ndarray:
        t, h = target_encoding(split, self._n)
        if config.lambda2 == 0:
            return SolveIRR(self._op)(t, h, config.lambda1)
        mode = KernelMode.SCALAR if self._n == 1 else KernelMode.VECTOR
        kernel = RelationshipKernel(sigma_f_sq=config.sigma_f_sq, mode=mode)
        return SolveERRClassification(self._op, kernel, self._pattern)(t, h, config).f

    def __call__(self, config: EnergyConfig, split: SupervisionSplit) -> np.ndarray:
        return decode_outputs(self.outputs(config, split))
