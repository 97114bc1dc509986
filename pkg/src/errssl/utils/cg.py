"""Nonlinear conjugate gradient (Polak-Ribiere+) with Armijo backtracking."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
import structlog

from ..domain.ports.objective import ObjectivePort

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class Solution:
    """Result of a solve; energy_trace[0] is the energy of the initializer."""

    f: np.ndarray
    energy_trace: tuple[float, ...]
    iterations_used: int
    converged: bool

    @property
    def energy(self) -> float:
        return self.energy_trace[-1]

    def trace_records(self, **context: Any) -> list[dict[str, Any]]:
        return [
            {**context, "iteration": k, "energy": float(e)}
            for k, e in enumerate(self.energy_trace)
        ]


def minimize_cg(
    objective: ObjectivePort,
    f0: np.ndarray,
    *,
    max_steps: int = 50,
    grad_tol: float = 1e-8,
    tol_scale: float = 1.0,
    armijo_c: float = 1e-4,
    shrink: float = 0.5,
    max_backtracks: int = 30,
) -> Solution:
    """Minimize from f0; every accepted step strictly lowers the energy.

    Stops after `max_steps` accepted steps, when ||grad|| < grad_tol * tol_scale,
    or when the line search fails (best iterate returned, converged=False).
    """
    f = np.array(f0, dtype=np.float64, copy=True)
    energy, grad = objective.value_and_gradient(f)
    trace = [energy]
    threshold = grad_tol * tol_scale
    gnorm = float(np.linalg.norm(grad))
    converged = gnorm < threshold
    direction = -grad
    previous_energy: float | None = None
    steps = 0

    while not converged and steps < max_steps:
        slope = float(np.vdot(grad, direction))
        if slope >= 0:
            # not a descent direction: restart along steepest descent
            direction = -grad
            slope = -gnorm * gnorm
        if previous_energy is None:
            alpha = min(1.0, 1.01 / gnorm)
        else:
            alpha = min(1.0, 2.02 * (previous_energy - energy) / -slope)
            if not np.isfinite(alpha) or alpha <= 0:
                alpha = 1.0

        accepted = False
        for backtracks in range(max_backtracks + 1):
            candidate = f + alpha * direction
            new_energy, new_grad = objective.value_and_gradient(candidate)
            if (
                np.isfinite(new_energy)
                and new_energy <= energy + armijo_c * alpha * slope
                and new_energy < energy
            ):
                accepted = True
                break
            alpha *= shrink
        if not accepted:
            logger.warning(
                "solver.line_search_failed", iteration=steps, energy=energy, grad_norm=gnorm
            )
            break

        beta = max(0.0, float(np.vdot(new_grad, new_grad - grad)) / (gnorm * gnorm))
        direction = -new_grad + beta * direction
        previous_energy = energy
        f, energy, grad = candidate, new_energy, new_grad
        gnorm = float(np.linalg.norm(grad))
        trace.append(energy)
        steps += 1
        converged = gnorm < threshold
        logger.debug(
            "solver.cg_step",
            iteration=steps,
            energy=energy,
            grad_norm=gnorm,
            alpha=alpha,
            backtracks=backtracks,
        )

    logger.info(
        "solver.cg_done",
        iterations=steps,
        energy=energy,
        grad_norm=gnorm,
        converged=converged,
    )
    return Solution(f=f, energy_trace=tuple(trace), iterations_used=steps, converged=converged)
