"""Port for persisting command outputs."""

from __future__ import annotations

from collections.abc import Sequence
from typing import Any, Protocol, runtime_checkable

import numpy as np


@runtime_checkable
class ResultsSinkPort(Protocol):
    def write_records(self, name: str, records: Sequence[dict[str, Any]]) -> None:
        """Write JSON-line records, sorted deterministically."""
        ...

    def write_text(self, name: str, text: str) -> None: ...

    def write_table(
        self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]]
    ) -> None: ...

    def write_coordinates(
        self, name: str, coordinates: np.ndarray, labels: np.ndarray | None
    ) -> None: ...
