"""Point clouds, supervision splits and relationship labels.

All types are frozen and hold read-only numpy arrays, so they can be shared
between threads. Every random draw goes through `numpy.random.default_rng`
(PCG64) seeded explicitly by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import structlog

from ..errors import DatasetError, SplitError
from ..models import RelationKind

logger = structlog.get_logger(__name__)


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class DataSet:
    points: np.ndarray
    labels: np.ndarray | None = None
    name: str = "dataset"
    label_names: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None]
        if points.ndim != 2:
            raise DatasetError("points must be a 2-D array")
        if points.shape[0] < 2:
            raise DatasetError(f"need at least 2 points, got {points.shape[0]}")
        if not np.all(np.isfinite(points)):
            bad = int(np.flatnonzero(~np.all(np.isfinite(points), axis=1))[0])
            raise DatasetError(f"point {bad} has a non-finite coordinate")
        object.__setattr__(self, "points", _frozen(points))

        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape != (points.shape[0],):
                raise DatasetError(
                    f"labels length {labels.shape} does not match {points.shape[0]} points"
                )
            if not np.issubdtype(labels.dtype, np.integer):
                if not np.all(np.equal(np.mod(labels, 1), 0)):
                    raise DatasetError("labels must be integer class ids")
            labels = labels.astype(np.int64)
            if labels.min() < 0:
                raise DatasetError("labels must be non-negative class ids")
            object.__setattr__(self, "labels", _frozen(labels))

    @property
    def u(self) -> int:
        return int(self.points.shape[0])

    @property
    def d(self) -> int:
        return int(self.points.shape[1])

    @property
    def n_classes(self) -> int:
        if self.labels is None:
            return 0
        return max(2, int(self.labels.max()) + 1)

    def require_labels(self) -> np.ndarray:
        if self.labels is None:
            raise DatasetError(f"dataset {self.name!r} has no ground-truth labels")
        return self.labels

    def subset(self, indices: np.ndarray, name: str | None = None) -> DataSet:
        indices = np.asarray(indices, dtype=np.int64)
        labels = None if self.labels is None else self.labels[indices]
        return DataSet(
            points=self.points[indices],
            labels=labels,
            name=name or self.name,
            label_names=self.label_names,
        )


@dataclass(frozen=True)
class SupervisionSplit:
    u: int
    n_classes: int
    labeled: np.ndarray
    labeled_targets: np.ndarray
    validation: np.ndarray
    validation_targets: np.ndarray
    unlabeled: np.ndarray

    def __post_init__(self) -> None:
        for name in ("labeled", "labeled_targets", "validation", "validation_targets", "unlabeled"):
            object.__setattr__(
                self, name, _frozen(np.asarray(getattr(self, name), dtype=np.int64))
            )
        if self.labeled.shape != self.labeled_targets.shape:
            raise SplitError("labeled indices and targets differ in length")
        if self.validation.shape != self.validation_targets.shape:
            raise SplitError("validation indices and targets differ in length")
        combined = np.concatenate([self.labeled, self.validation, self.unlabeled])
        if combined.size != self.u or not np.array_equal(
            np.sort(combined), np.arange(self.u)
        ):
            raise SplitError("labeled/validation/unlabeled must partition 0..u-1")
        targets = np.concatenate([self.labeled_targets, self.validation_targets])
        if targets.size and (targets.min() < 0 or targets.max() >= self.n_classes):
            raise SplitError(f"targets must be class ids in [0, {self.n_classes})")


@dataclass(frozen=True)
class RelationLabelSet:
    """Sparse must-link / cannot-link labels on unordered point pairs."""

    i: np.ndarray
    j: np.ndarray
    must: np.ndarray

    def __post_init__(self) -> None:
        i = np.asarray(self.i, dtype=np.int64)
        j = np.asarray(self.j, dtype=np.int64)
        must = np.asarray(self.must, dtype=bool)
        if not (i.shape == j.shape == must.shape) or i.ndim != 1:
            raise DatasetError("relation label arrays must be 1-D and equally long")
        if np.any(i == j):
            bad = int(np.flatnonzero(i == j)[0])
            raise DatasetError(f"relation label {bad} links point {i[bad]} to itself")
        if i.size and min(i.min(), j.min()) < 0:
            raise DatasetError("relation label indices must be non-negative")
        lo, hi = np.minimum(i, j), np.maximum(i, j)
        pairs = np.stack([lo, hi], axis=1)
        if np.unique(pairs, axis=0).shape[0] != pairs.shape[0]:
            raise DatasetError("relation labels contain a duplicate unordered pair")
        object.__setattr__(self, "i", _frozen(i))
        object.__setattr__(self, "j", _frozen(j))
        object.__setattr__(self, "must", _frozen(must))

    @classmethod
    def empty(cls) -> RelationLabelSet:
        return cls(np.array([], dtype=np.int64), np.array([], dtype=np.int64), np.array([], dtype=bool))

    @classmethod
    def from_entries(cls, entries: list[tuple[int, int, RelationKind]]) -> RelationLabelSet:
        if not entries:
            return cls.empty()
        i, j, kinds = zip(*entries, strict=True)
        return cls(
            np.asarray(i), np.asarray(j), np.asarray([k == RelationKind.MUST for k in kinds])
        )

    @property
    def s_r(self) -> int:
        return int(self.i.size)

    @property
    def targets(self) -> np.ndarray:
        """T_ij per entry: 1 for must-link, 0 for cannot-link."""
        return self.must.astype(np.float64)

    @property
    def entries(self) -> list[tuple[int, int, RelationKind]]:
        return [
            (int(a), int(b), RelationKind.MUST if m else RelationKind.CANNOT)
            for a, b, m in zip(self.i, self.j, self.must, strict=True)
        ]

    def check_bounds(self, u: int) -> None:
        if self.s_r and max(self.i.max(), self.j.max()) >= u:
            raise DatasetError(f"relation label index out of range for u={u}")

    def consistent_with(self, labels: np.ndarray) -> bool:
        same = labels[self.i] == labels[self.j]
        return bool(np.all(same == self.must))


def make_split(
    ds: DataSet,
    n_labeled: int,
    n_validation: int,
    seed: int,
    *,
    per_class: bool = False,
) -> SupervisionSplit:
    """Draw a labeled / validation / unlabeled partition without replacement."""
    labels = ds.require_labels()
    rng = np.random.default_rng(seed)
    if n_labeled < 0 or n_validation < 0:
        raise SplitError("split sizes must be non-negative")

    if per_class:
        classes = np.unique(labels)
        labeled_parts, validation_parts = [], []
        for c in classes:
            members = np.flatnonzero(labels == c)
            if members.size < n_labeled + n_validation:
                raise SplitError(
                    f"class {int(c)} has {members.size} points, "
                    f"needs {n_labeled + n_validation}"
                )
            order = rng.permutation(members)
            labeled_parts.append(order[:n_labeled])
            validation_parts.append(order[n_labeled : n_labeled + n_validation])
        labeled = np.concatenate(labeled_parts)
        validation = np.concatenate(validation_parts)
        if labeled.size + validation.size >= ds.u:
            raise SplitError("per-class split leaves no unlabeled points")
    else:
        if n_labeled + n_validation >= ds.u:
            raise SplitError(
                f"n_labeled + n_validation = {n_labeled + n_validation} must be < u = {ds.u}"
            )
        order = rng.permutation(ds.u)
        labeled = order[:n_labeled]
        validation = order[n_labeled : n_labeled + n_validation]

    labeled = np.sort(labeled)
    validation = np.sort(validation)
    taken = np.zeros(ds.u, dtype=bool)
    taken[labeled] = True
    taken[validation] = True
    return SupervisionSplit(
        u=ds.u,
        n_classes=ds.n_classes,
        labeled=labeled,
        labeled_targets=labels[labeled],
        validation=validation,
        validation_targets=labels[validation],
        unlabeled=np.flatnonzero(~taken),
    )


def _sample_pairs(
    rng: np.random.Generator,
    labels: np.ndarray,
    count: int,
    same_class: bool,
    exclude: set[tuple[int, int]],
) -> list[tuple[int, int]]:
    u = labels.size
    chosen: list[tuple[int, int]] = []
    seen = set(exclude)
    while len(chosen) < count:
        batch = max(64, 4 * (count - len(chosen)))
        a = rng.integers(0, u, size=batch)
        b = rng.integers(0, u, size=batch)
        for x, y in zip(a.tolist(), b.tolist(), strict=True):
            if x == y or (labels[x] == labels[y]) != same_class:
                continue
            pair = (min(x, y), max(x, y))
            if pair in seen:
                continue
            seen.add(pair)
            chosen.append(pair)
            if len(chosen) == count:
                break
    return chosen


def sample_relation_labels(ds: DataSet, s_r: int, seed: int) -> RelationLabelSet:
    """Sample s_r/2 must-link and s_r/2 cannot-link pairs from ground truth.

    Pairs are drawn uniformly by rejection over unordered point pairs, so each
    admissible pair is equally likely and none repeats.
    """
    labels = ds.require_labels()
    if s_r < 2 or s_r % 2:
        raise SplitError(f"s_R must be an even count >= 2, got {s_r}")
    half = s_r // 2
    counts = np.bincount(labels)
    must_available = int(np.sum(counts * (counts - 1) // 2))
    total_pairs = ds.u * (ds.u - 1) // 2
    cannot_available = total_pairs - must_available
    if must_available == 0:
        raise SplitError("no class has 2 or more members; must-links impossible")
    if cannot_available == 0:
        raise SplitError("all points share one class; cannot-links impossible")
    if must_available < half or cannot_available < half:
        raise SplitError(
            f"requested {half} pairs per kind, available must={must_available} "
            f"cannot={cannot_available}"
        )

    rng = np.random.default_rng(seed)
    must = _sample_pairs(rng, labels, half, True, set())
    cannot = _sample_pairs(rng, labels, half, False, set(must))
    pairs = np.asarray(must + cannot, dtype=np.int64)
    flags = np.r_[np.ones(half, dtype=bool), np.zeros(half, dtype=bool)]
    logger.debug("dataset.relations_sampled", s_r=s_r, seed=seed)
    return RelationLabelSet(pairs[:, 0], pairs[:, 1], flags)


def target_encoding(split: SupervisionSplit, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (t, H): u x n targets and the diagonal of the label indicator H.

    n = 1 encodes binary classes as -1 / +1; n = C one-hot encodes C classes.
    """
    if n == 1:
        if split.n_classes != 2:
            raise SplitError(f"binary encoding needs 2 classes, split has {split.n_classes}")
    elif n != split.n_classes:
        raise SplitError(f"output dimension {n} does not match {split.n_classes} classes")

    t = np.zeros((split.u, n), dtype=np.float64)
    h = np.zeros(split.u, dtype=np.float64)
    h[split.labeled] = 1.0
    if n == 1:
        t[split.labeled, 0] = np.where(split.labeled_targets == 1, 1.0, -1.0)
    else:
        t[split.labeled, split.labeled_targets] = 1.0
    return t, h


def decode_outputs(f: np.ndarray) -> np.ndarray:
    """Threshold at 0 for one output column, row-wise argmax (lowest id on ties) otherwise."""
    f = np.asarray(f)
    if f.ndim == 1 or f.shape[1] == 1:
        return (f.reshape(-1) > 0).astype(np.int64)
    return np.argmax(f, axis=1).astype(np.int64)
