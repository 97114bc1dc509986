from __future__ import annotations

import numpy as np
import structlog
from scipy import linalg

from ...domain.graph import LaplacianOp
from ...errors import SingularSystemError

logger = structlog.get_logger(__name__)

_RESIDUAL_TOL = 1e-8


class SolveIRR:
    """Closed-form minimizer of (f - t)^T H (f - t) + lambda1 tr[f^T L^p f].

    Solves (H + lambda1 L^p) f = H t for all output columns with one dense
    Cholesky factorization.
    """

    def __init__(self, op: LaplacianOp) -> None:
        self._op = op

    def _check_anchored(self, h: np.ndarray) -> None:
        count, component = self._op.graph.connected_components()
        for c in range(count):
            members = np.flatnonzero(component == c)
            if not np.any(h[members] > 0):
                raise SingularSystemError(
                    f"component {c} ({members.size} vertices, first vertex "
                    f"{int(members[0])}) has no labeled point; the Laplacian is "
                    "constant on it, so H + lambda1 L^p has a nullspace there"
                )

    def __call__(self, t: np.ndarray, h: np.ndarray, lambda1: float) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        squeeze = t.ndim == 1
        if squeeze:
            t = t[:, None]
        h = np.asarray(h, dtype=np.float64)
        if t.shape[0] != self._op.u or h.shape != (self._op.u,):
            raise ValueError("t and H must have one row per graph vertex")
        if lambda1 < 0:
            raise ValueError(f"lambda1 must be non-negative, got {lambda1}")

        if lambda1 == 0:
            missing = np.flatnonzero(h <= 0)
            if missing.size:
                raise SingularSystemError(
                    f"lambda1 = 0 leaves {missing.size} unlabeled points unconstrained "
                    f"(first: {int(missing[0])})"
                )
            f = t.copy()
            return f[:, 0] if squeeze else f

        self._check_anchored(h)
        system = self._op.matrix().toarray() * lambda1
        system[np.diag_indices_from(system)] += h
        rhs = h[:, None] * t
        try:
            factor = linalg.cho_factor(system, lower=True)
        except linalg.LinAlgError as e:
            raise SingularSystemError(f"IRR system is not positive definite: {e}") from e
        f = linalg.cho_solve(factor, rhs)

        scale = max(float(np.linalg.norm(rhs)), 1e-300)
        residual = float(np.linalg.norm(system @ f - rhs)) / scale
        if residual >= _RESIDUAL_TOL:
            # one step of iterative refinement
            f = f + linalg.cho_solve(factor, rhs - system @ f)
            residual = float(np.linalg.norm(system @ f - rhs)) / scale
            if residual >= _RESIDUAL_TOL:
                logger.warning("solver.irr_residual", relative_residual=residual)
        logger.debug("solver.irr_done", u=self._op.u, n=t.shape[1], relative_residual=residual)
        return f[:, 0] if squeeze else f


def solve_irr(t: np.ndarray, h: np.ndarray, op: LaplacianOp, lambda1: float) -> np.ndarray:
    return SolveIRR(op)(t, h, lambda1)
