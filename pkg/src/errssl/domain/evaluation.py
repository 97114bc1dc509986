"""Clustering with NCut-selected restarts and the error metrics of each protocol."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import structlog
from sklearn.cluster import KMeans

from ..errors import SplitError
from ..models import Metrics
from .graph import Graph, knn_search, ncut

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class Clustering:
    assignment: np.ndarray
    ncut: float
    restart: int


def kmeans_ncut(
    f: np.ndarray,
    k: int,
    g: Graph,
    *,
    restarts: int = 10,
    seed: int = 0,
    plain_init: bool = False,
) -> Clustering:
    """Run k-means `restarts` times on the rows of f and keep the lowest-NCut result.

    Each restart is Lloyd iteration to an assignment fixpoint (at most 300
    iterations) from k-means++ seeding, or uniform seeding with `plain_init`.
    Empty clusters are re-seeded at far-away points by scikit-learn. Ties in
    NCut keep the earliest restart.
    """
    f = np.asarray(f, dtype=np.float64)
    if f.ndim == 1:
        f = f[:, None]
    if not 2 <= k <= f.shape[0]:
        raise ValueError(f"need 2 <= k <= u, got k={k}, u={f.shape[0]}")
    states = np.random.SeedSequence(seed).generate_state(restarts)
    best: Clustering | None = None
    for restart, state in enumerate(states):
        model = KMeans(
            n_clusters=k,
            init="random" if plain_init else "k-means++",
            n_init=1,
            max_iter=300,
            tol=0.0,
            algorithm="lloyd",
            random_state=int(state),
        )
        assignment = model.fit_predict(f).astype(np.int64)
        value = ncut(g, assignment)
        logger.debug("eval.kmeans_restart", restart=restart, ncut=value)
        if best is None or value < best.ncut:
            best = Clustering(assignment=assignment, ncut=value, restart=restart)
    assert best is not None
    return best


def clustering_error(assignment: np.ndarray, truth: np.ndarray) -> Metrics:
    """Points whose label differs from their cluster's dominant label (lower id on ties)."""
    assignment = np.asarray(assignment, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if assignment.shape != truth.shape:
        raise ValueError("assignment and truth must have equal length")
    errors = 0
    for cluster in np.unique(assignment):
        members = truth[assignment == cluster]
        errors += members.size - int(np.bincount(members).max())
    return Metrics.from_counts(errors, truth.size)


def loo_1nn_error(f: np.ndarray, truth: np.ndarray) -> Metrics:
    """Leave-one-out 1-NN error on the rows of f (ties go to the lowest index)."""
    f = np.asarray(f, dtype=np.float64)
    if f.ndim == 1:
        f = f[:, None]
    truth = np.asarray(truth, dtype=np.int64)
    if f.shape[0] < 2:
        raise ValueError("leave-one-out needs at least 2 points")
    nearest, _ = knn_search(f, 1)
    errors = int(np.sum(truth[nearest[:, 0]] != truth))
    return Metrics.from_counts(errors, truth.size)


def classification_error(
    pred_labels: np.ndarray, truth: np.ndarray, eval_indices: np.ndarray
) -> Metrics:
    eval_indices = np.asarray(eval_indices, dtype=np.int64)
    if eval_indices.size == 0:
        raise SplitError("classification error needs a nonempty evaluation set")
    pred = np.asarray(pred_labels)[eval_indices]
    errors = int(np.sum(pred != np.asarray(truth)[eval_indices]))
    return Metrics.from_counts(errors, eval_indices.size)


def reduction_of_error_rate(irr_error: float, err_error: float) -> float:
    """Relative improvement of ERR over IRR in percent."""
    if irr_error == 0:
        return 0.0
    return 100.0 * (irr_error - err_error) / irr_error
