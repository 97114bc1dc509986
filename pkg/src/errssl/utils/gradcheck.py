"""Central finite differences for checking analytic gradients."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
import structlog

logger = structlog.get_logger(__name__)


def finite_difference(
    func: Callable[[np.ndarray], float], x: np.ndarray, eps: float = 1e-5
) -> np.ndarray:
    """Centered-difference gradient of a scalar function, one coordinate at a time."""
    x0 = np.array(x, dtype=np.float64, copy=True)
    grad = np.zeros_like(x0)
    flat = x0.reshape(-1)
    out = grad.reshape(-1)
    for j in range(flat.size):
        original = flat[j]
        flat[j] = original + eps
        fplus = func(x0)
        flat[j] = original - eps
        fminus = func(x0)
        flat[j] = original
        out[j] = (fplus - fminus) / (2 * eps)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """||a - n|| / max(||a||, ||n||); 0 when both vanish."""
    scale = max(float(np.linalg.norm(analytic)), float(np.linalg.norm(numeric)))
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(analytic - numeric)) / scale


def check_gradient(
    value_and_gradient: Callable[[np.ndarray], tuple[float, np.ndarray]],
    x: np.ndarray,
    eps: float = 1e-5,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Return (relative error, analytic gradient, numeric gradient) at x."""
    _, analytic = value_and_gradient(x)
    numeric = finite_difference(lambda z: value_and_gradient(z)[0], x, eps)
    error = relative_error(analytic, numeric)
    logger.debug("gradcheck.point", size=int(np.size(x)), rel_error=error)
    return error, analytic, numeric
