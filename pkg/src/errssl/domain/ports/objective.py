"""Port for differentiable objectives consumed by the CG minimizer."""

from __future__ import annotations

from typing import Protocol, runtime_checkable

import numpy as np


@runtime_checkable
class ObjectivePort(Protocol):
    def value_and_gradient(self, f: np.ndarray) -> tuple[float, np.ndarray]:
        """Return E(f) and dE/df with the shape of f."""
        ...
