"""Result writers for an output directory: JSON lines, key = value text, CSV tables."""

from __future__ import annotations

import csv
import json
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np
import structlog
from scipy import sparse

from ...domain.graph import Graph
from ...domain.ports.results_sink import ResultsSinkPort
from ...errors import DatasetError

logger = structlog.get_logger(__name__)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if hasattr(value, "value") and not isinstance(value, int | float | str):
        return value.value
    return value


def _cell(value: Any) -> str:
    if isinstance(value, float | np.floating):
        return repr(float(value))
    return str(value)


def dump_graph(g: Graph, path: str | Path) -> int:
    """Write the upper triangle of W as `i j w` lines; returns the edge count."""
    upper = sparse.triu(g.W, k=1).tocoo()
    order = np.lexsort((upper.col, upper.row))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for k in order:
            handle.write(f"{int(upper.row[k])} {int(upper.col[k])} {float(upper.data[k])!r}\n")
    return int(order.size)


def read_coordinates(path: str | Path) -> tuple[np.ndarray, np.ndarray | None]:
    """Inverse of `ResultFiles.write_coordinates`."""
    with Path(path).open("r", encoding="utf-8", newline="") as handle:
        rows = list(csv.reader(handle))
    if len(rows) < 2:
        raise DatasetError(f"{path} has no coordinate rows")
    header, body = rows[0], rows[1:]
    has_label = header[-1] == "label"
    width = len(header) - 1 if has_label else len(header)
    coords = np.array([[float(cell) for cell in row[:width]] for row in body], dtype=np.float64)
    labels = np.array([int(row[-1]) for row in body], dtype=np.int64) if has_label else None
    return coords, labels


class ResultFiles(ResultsSinkPort):
    """Writes every artifact of a run under one output directory."""

    def __init__(self, out_dir: str | Path) -> None:
        self.out_dir = Path(out_dir)

    def _path(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / name

    def write_records(self, name: str, records: Sequence[dict[str, Any]]) -> None:
        lines = sorted(json.dumps(_jsonable(r), sort_keys=True) for r in records)
        path = self._path(name)
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        logger.debug("results.written", path=str(path), records=len(lines))

    def write_text(self, name: str, text: str) -> None:
        self._path(name).write_text(text, encoding="utf-8")

    def write_table(
        self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]]
    ) -> None:
        with self._path(name).open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(v) for v in row])

    def write_coordinates(
        self, name: str, coordinates: np.ndarray, labels: np.ndarray | None
    ) -> None:
        coordinates = np.asarray(coordinates, dtype=np.float64)
        if coordinates.ndim == 1:
            coordinates = coordinates[:, None]
        header = [f"x{c}" for c in range(coordinates.shape[1])]
        if labels is not None:
            header.append("label")
        rows: list[list[Any]] = []
        for r, point in enumerate(coordinates):
            row: list[Any] = [float(v) for v in point]
            if labels is not None:
                row.append(int(labels[r]))
            rows.append(row)
        self.write_table(name, header, rows)

    def write_graph(self, name: str, g: Graph) -> None:
        edges = dump_graph(g, self._path(name))
        logger.debug("results.graph_dumped", name=name, edges=edges)
