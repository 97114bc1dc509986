from __future__ import annotations

import numpy as np
import structlog

from ...domain.energy import ClassificationObjective
from ...domain.graph import LaplacianOp
from ...domain.relreg import RelationshipKernel, SparsityPattern
from ...models import EnergyConfig
from ...utils.cg import Solution, minimize_cg
from .solve_irr import SolveIRR

logger = structlog.get_logger(__name__)


class SolveERRClassification:
    """IRR initialization followed by nonlinear CG on the full classification energy."""

    def __init__(
        self,
        op: LaplacianOp,
        kernel: RelationshipKernel,
        pattern: SparsityPattern | None = None,
    ) -> None:
        self._op = op
        self._kernel = kernel
        self._pattern = pattern
        self._irr = SolveIRR(op)

    def __call__(self, t: np.ndarray, h: np.ndarray, config: EnergyConfig) -> Solution:
        t = np.asarray(t, dtype=np.float64)
        if t.ndim == 1:
            t = t[:, None]
        h = np.asarray(h, dtype=np.float64)
        f0 = self._irr(t, h, config.lambda1)
        objective = ClassificationObjective(
            t=t, h=h, op=self._op, config=config, kernel=self._kernel, pattern=self._pattern
        )
        if config.lambda2 == 0:
            # f0 is already the exact minimizer; skip CG so ERR reproduces IRR bit for bit
            energy, _ = objective.value_and_gradient(f0)
            return Solution(f=f0, energy_trace=(energy,), iterations_used=0, converged=True)

        tol_scale = 1.0 + float(np.linalg.norm(h[:, None] * t))
        solution = minimize_cg(
            objective,
            f0,
            max_steps=config.cg_steps,
            grad_tol=config.grad_tol,
            tol_scale=tol_scale,
        )
        logger.info(
            "solver.err_classification_done",
            config_hash=config.config_hash(),
            initial_energy=solution.energy_trace[0],
            final_energy=solution.energy,
            iterations=solution.iterations_used,
        )
        return solution


def solve_err_classification(
    t: np.ndarray,
    h: np.ndarray,
    op: LaplacianOp,
    config: EnergyConfig,
    kernel: RelationshipKernel,
    pattern: SparsityPattern | None = None,
) -> Solution:
    return SolveERRClassification(op, kernel, pattern)(t, h, config)
