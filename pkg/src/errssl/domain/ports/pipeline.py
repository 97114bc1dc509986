"""Port for a train-then-predict pipeline evaluated by hyper-parameter validation."""

from __future__ import annotations

from typing import Protocol, runtime_checkable

import numpy as np

from ...models import EnergyConfig
from ..dataset import SupervisionSplit


@runtime_checkable
class PipelinePort(Protocol):
    def __call__(self, config: EnergyConfig, split: SupervisionSplit) -> np.ndarray:
        """Train on `split.labeled` and return one predicted class id per point."""
        ...
