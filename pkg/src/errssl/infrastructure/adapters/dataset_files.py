"""Dataset sources: CSV and libsvm-like files, relation-label files, synthetic generators."""

from __future__ import annotations

import csv
import math
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any
from urllib.parse import parse_qsl

import numpy as np
import structlog
from sklearn.datasets import make_blobs, make_classification, make_moons

from ...domain.dataset import DataSet, RelationLabelSet
from ...domain.ports.dataset_source import DatasetSourcePort
from ...errors import DatasetError
from ...models import RelationKind

logger = structlog.get_logger(__name__)

SYNTHETIC_PREFIX = "synthetic:"
LIBSVM_SUFFIXES = {".libsvm", ".svm", ".svmlight"}
RELATION_HEADER = ("i", "j", "kind")


def _parse_float(cell: str) -> float | None:
    try:
        value = float(cell)
    except ValueError:
        return None
    return value


def _encode_labels(tokens: Sequence[str], lines: Sequence[int]) -> tuple[np.ndarray, tuple[str, ...]]:
    """Map raw label tokens to contiguous ids 0..C-1, numeric order when all tokens are numbers."""
    numeric = [_parse_float(token) for token in tokens]
    if all(value is not None for value in numeric):
        keys: list[Any] = numeric
        names = {value: f"{value:g}" for value in numeric if value is not None}
    else:
        keys = [token.strip() for token in tokens]
        names = {key: key for key in keys}
    for key, line in zip(keys, lines, strict=True):
        if key == "":
            raise DatasetError("empty label", line=line)
    ordered = sorted(set(keys))
    index = {key: i for i, key in enumerate(ordered)}
    ids = np.array([index[key] for key in keys], dtype=np.int64)
    return ids, tuple(names[key] for key in ordered)


def _is_header(first: Sequence[str], second: Sequence[str] | None) -> bool:
    """A column that is text in the first row but numeric in the second marks a header."""
    if second is None:
        return any(_parse_float(cell) is None for cell in first)
    return any(
        _parse_float(a) is None and _parse_float(b) is not None
        for a, b in zip(first, second, strict=False)
    )


def read_csv_dataset(path: Path, label_col: str = "label") -> DataSet:
    """Numeric feature columns plus an optional label column.

    With a header row the label column is found by name; without one,
    `label_col` may be a column index, otherwise the last column is the label.
    `label_col = none` reads an unlabeled point cloud.
    """
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        rows: list[tuple[int, list[str]]] = []
        for row in reader:
            if not row or all(not cell.strip() for cell in row):
                continue
            rows.append((reader.line_num, [cell.strip() for cell in row]))
    if not rows:
        raise DatasetError(f"{path} is empty")

    header: list[str] | None = None
    if _is_header(rows[0][1], rows[1][1] if len(rows) > 1 else None):
        header = rows[0][1]
        rows = rows[1:]
        if not rows:
            raise DatasetError(f"{path} has a header but no data rows")

    width = len(header) if header is not None else len(rows[0][1])
    label_index: int | None
    if label_col.lower() == "none":
        label_index = None
    elif header is not None:
        if label_col in header:
            label_index = header.index(label_col)
        elif label_col.lstrip("-").isdigit():
            label_index = int(label_col) % width
        elif label_col == "label" and all(_parse_float(cell) is None for cell in header):
            label_index = None
        elif label_col == "label":
            raise DatasetError(
                f"first row {header} mixes numbers and text; fix the cell or pass --label-col",
                line=1,
            )
        else:
            raise DatasetError(f"label column {label_col!r} not in header {header}", line=1)
    else:
        label_index = int(label_col) % width if label_col.lstrip("-").isdigit() else width - 1

    features: list[list[float]] = []
    label_tokens: list[str] = []
    label_lines: list[int] = []
    for line, row in rows:
        if len(row) != width:
            raise DatasetError(f"expected {width} columns, got {len(row)}", line=line)
        values: list[float] = []
        for column, cell in enumerate(row):
            if column == label_index:
                continue
            value = _parse_float(cell)
            if value is None or not math.isfinite(value):
                raise DatasetError(f"non-numeric feature value {cell!r} in column {column}", line=line)
            values.append(value)
        features.append(values)
        if label_index is not None:
            label_tokens.append(row[label_index])
            label_lines.append(line)

    if not features[0]:
        raise DatasetError(f"{path} has no feature columns")
    labels, names = (None, ()) if label_index is None else _encode_labels(label_tokens, label_lines)
    return DataSet(points=np.array(features), labels=labels, name=path.stem, label_names=names)


def read_libsvm_dataset(path: Path) -> DataSet:
    """`label idx:value ...` lines with 1-based indices; absent features are 0."""
    label_tokens: list[str] = []
    label_lines: list[int] = []
    rows: list[dict[int, float]] = []
    with path.open("r", encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            feats: dict[int, float] = {}
            for token in parts[1:]:
                idx_s, sep, val_s = token.partition(":")
                value = _parse_float(val_s) if sep else None
                if not idx_s.isdigit() or int(idx_s) < 1 or value is None or not math.isfinite(value):
                    raise DatasetError(f"invalid feature token {token!r}", line=line_no)
                feats[int(idx_s)] = value
            if _parse_float(parts[0]) is None:
                raise DatasetError(f"invalid label {parts[0]!r}", line=line_no)
            label_tokens.append(parts[0])
            label_lines.append(line_no)
            rows.append(feats)
    if not rows:
        raise DatasetError(f"{path} is empty")
    d = max((max(feats) for feats in rows if feats), default=0)
    if d == 0:
        raise DatasetError(f"{path} has no feature values")
    points = np.zeros((len(rows), d), dtype=np.float64)
    for r, feats in enumerate(rows):
        for idx, value in feats.items():
            points[r, idx - 1] = value
    labels, names = _encode_labels(label_tokens, label_lines)
    return DataSet(points=points, labels=labels, name=path.stem, label_names=names)


def _moons(params: dict[str, str]) -> tuple[np.ndarray, np.ndarray]:
    return make_moons(
        n_samples=int(params.get("n", 400)),
        noise=float(params.get("noise", 0.1)),
        random_state=int(params.get("seed", 0)),
    )


def _blobs(params: dict[str, str]) -> tuple[np.ndarray, np.ndarray]:
    return make_blobs(
        n_samples=int(params.get("n", 600)),
        n_features=int(params.get("features", 2)),
        centers=int(params.get("centers", 3)),
        cluster_std=float(params.get("std", 1.0)),
        random_state=int(params.get("seed", 0)),
    )


def _digits_like(params: dict[str, str]) -> tuple[np.ndarray, np.ndarray]:
    features = int(params.get("features", 64))
    classes = int(params.get("classes", 10))
    informative = min(features, int(params.get("informative", 10)))
    if classes > 2**informative:
        raise DatasetError(f"{classes} classes need more than {informative} informative features")
    return make_classification(
        n_samples=int(params.get("n", 2000)),
        n_features=features,
        n_informative=informative,
        n_redundant=0,
        n_classes=classes,
        n_clusters_per_class=1,
        class_sep=float(params.get("sep", 1.0)),
        random_state=int(params.get("seed", 0)),
    )


SYNTHETIC_SOURCES: dict[str, Callable[[dict[str, str]], tuple[np.ndarray, np.ndarray]]] = {
    "moons": _moons,
    "blobs": _blobs,
    "digits-like": _digits_like,
}


def load_synthetic(source: str) -> DataSet:
    """`synthetic:<name>?key=value&...`, e.g. `synthetic:moons?n=400&noise=0.1&seed=3`."""
    spec = source[len(SYNTHETIC_PREFIX) :] if source.startswith(SYNTHETIC_PREFIX) else source
    name, _, query = spec.partition("?")
    generator = SYNTHETIC_SOURCES.get(name)
    if generator is None:
        raise DatasetError(
            f"unknown synthetic source {name!r}; choose from {sorted(SYNTHETIC_SOURCES)}"
        )
    params = dict(parse_qsl(query, strict_parsing=bool(query)))
    try:
        points, labels = generator(params)
    except ValueError as e:
        raise DatasetError(f"bad parameters for synthetic:{name}: {e}") from e
    classes = int(labels.max()) + 1
    return DataSet(
        points=points,
        labels=labels,
        name=name,
        label_names=tuple(str(c) for c in range(classes)),
    )


def read_relation_labels(path: Path, u: int) -> RelationLabelSet:
    """`i,j,must|cannot` rows (0-based indices, optional header, `#` comments)."""
    entries: list[tuple[int, int, RelationKind]] = []
    seen: dict[tuple[int, int], int] = {}
    with path.open("r", encoding="utf-8", newline="") as handle:
        lines = [(n, raw.split("#", 1)[0].strip()) for n, raw in enumerate(handle, start=1)]
    for line_no, line in lines:
        if not line:
            continue
        cells = [cell.strip() for cell in next(csv.reader([line]))]
        if tuple(c.lower() for c in cells) == RELATION_HEADER:
            continue
        if len(cells) != 3:
            raise DatasetError(f"expected 'i,j,must|cannot', got {line!r}", line=line_no)
        try:
            i, j = int(cells[0]), int(cells[1])
            kind = RelationKind(cells[2].lower())
        except ValueError as e:
            raise DatasetError(f"invalid relation label {line!r}", line=line_no) from e
        if i == j:
            raise DatasetError(f"point {i} is linked to itself", line=line_no)
        if not (0 <= i < u and 0 <= j < u):
            raise DatasetError(f"index out of range for u={u}", line=line_no)
        pair = (min(i, j), max(i, j))
        if pair in seen:
            raise DatasetError(f"duplicate pair {pair} (first on line {seen[pair]})", line=line_no)
        seen[pair] = line_no
        entries.append((i, j, kind))
    return RelationLabelSet.from_entries(entries)


def write_relation_labels(labels: RelationLabelSet, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(RELATION_HEADER)
        for i, j, kind in labels.entries:
            writer.writerow([i, j, kind.value])


class FileDatasetSource(DatasetSourcePort):
    def __init__(self, *, label_col: str = "label", data_format: str | None = None) -> None:
        self._label_col = label_col
        self._data_format = data_format

    def load_dataset(self, source: str) -> DataSet:
        if source.startswith(SYNTHETIC_PREFIX):
            ds = load_synthetic(source)
        else:
            path = Path(source)
            if not path.is_file():
                raise DatasetError(f"dataset file not found: {source}")
            fmt = self._data_format or (
                "libsvm" if path.suffix.lower() in LIBSVM_SUFFIXES else "csv"
            )
            if fmt == "libsvm":
                ds = read_libsvm_dataset(path)
            elif fmt == "csv":
                ds = read_csv_dataset(path, self._label_col)
            else:
                raise DatasetError(f"unknown data format {fmt!r}; use csv or libsvm")
        logger.info(
            "dataset.loaded", source=source, u=ds.u, d=ds.d, classes=ds.n_classes
        )
        return ds

    def load_relation_labels(self, path: str, u: int) -> RelationLabelSet:
        file = Path(path)
        if not file.is_file():
            raise DatasetError(f"relation label file not found: {path}")
        labels = read_relation_labels(file, u)
        logger.info("dataset.relations_loaded", path=path, s_r=labels.s_r)
        return labels
