"""Port for anything that yields datasets and relation labels."""

from __future__ import annotations

from typing import Protocol, runtime_checkable

from ..dataset import DataSet, RelationLabelSet


@runtime_checkable
class DatasetSourcePort(Protocol):
    def load_dataset(self, source: str) -> DataSet:
        """Load a point cloud from a path or a synthetic source description."""
        ...

    def load_relation_labels(self, path: str, u: int) -> RelationLabelSet:
        """Load must-link / cannot-link labels for a dataset of u points."""
        ...
