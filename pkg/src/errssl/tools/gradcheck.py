"""`gradcheck`: analytic gradients against central finite differences on random instances."""

from __future__ import annotations

from collections.abc import Callable
from typing import Any

import numpy as np
import structlog

from ..config.run_config import RunConfig
from ..di.container import get_settings
from ..domain.dataset import RelationLabelSet
from ..domain.energy import ClassificationObjective, EmbeddingObjective
from ..domain.graph import knn_graph, laplacian
from ..domain.relreg import (
    RelationshipKernel,
    label_energy,
    rel_energy_and_gradient,
    sparse_rel_energy,
    sparsity_pattern,
)
from ..infrastructure.adapters.result_files import ResultFiles
from ..models import CommandResult, EnergyConfig, KernelMode, LaplacianKind
from ..utils.gradcheck import check_gradient
from .common import execute, format_table

logger = structlog.get_logger(__name__)

Objective = Callable[[np.ndarray], tuple[float, np.ndarray]]

TERMS = ("rel", "sparse", "label", "classification", "embedding")


def _random_labels(rng: np.random.Generator, u: int, count: int) -> RelationLabelSet:
    pairs: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    while len(pairs) < count:
        i, j = (int(v) for v in rng.choice(u, size=2, replace=False))
        key = (min(i, j), max(i, j))
        if key not in seen:
            seen.add(key)
            pairs.append((i, j))
    must = rng.random(count) < 0.5
    return RelationLabelSet(
        np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs]), must
    )


def random_instance(seed: int) -> tuple[np.ndarray, dict[str, Objective]]:
    """A random point f and the energy terms to check there (u in [5, 15], n in {1, 2, 3})."""
    rng = np.random.default_rng(seed)
    u = int(rng.integers(5, 16))
    n = int(rng.integers(1, 4))
    kind = LaplacianKind.SYMMETRIC if seed % 2 else LaplacianKind.UNNORMALIZED
    p = 1 + seed % 2
    points = rng.normal(size=(u, 2))
    graph = knn_graph(points, min(3, u - 1), None)
    op = laplacian(graph, kind, p=p)
    op1 = laplacian(graph, kind, p=1)
    mode = KernelMode.SCALAR if n == 1 else KernelMode.VECTOR
    kernel = RelationshipKernel(sigma_f_sq=float(n * rng.uniform(0.5, 2.0)), mode=mode)
    pattern = sparsity_pattern(points, min(3, u - 1))
    labels = _random_labels(rng, u, 4)
    f = rng.normal(size=(u, n))

    h = (rng.random(u) < 0.5).astype(np.float64)
    t = rng.normal(size=(u, n)) * h[:, None]
    classification = ClassificationObjective(
        t=t,
        h=h,
        op=op,
        config=EnergyConfig(lambda1=0.7, lambda2=1.3, p=p),
        kernel=kernel,
    )
    embedding = EmbeddingObjective(
        t_spec=rng.normal(size=(u, n)),
        op=op1,
        config=EnergyConfig(lambda1=0.5, lambda2=1.1, lambda3=2.0),
        kernel=kernel,
        labels=labels,
        pattern=pattern,
    )
    terms: dict[str, Objective] = {
        "rel": lambda x: rel_energy_and_gradient(x, kernel, op),
        "sparse": lambda x: sparse_rel_energy(x, kernel, graph, pattern, kind=kind),
        "label": lambda x: label_energy(x, kernel, labels),
        "classification": classification.value_and_gradient,
        "embedding": embedding.value_and_gradient,
    }
    return f, terms


def _flip_sign(objective: Objective) -> Objective:
    def flipped(x: np.ndarray) -> tuple[float, np.ndarray]:
        value, grad = objective(x)
        return value, -grad

    return flipped


def _preview(values: np.ndarray) -> list[float]:
    return [float(v) for v in np.asarray(values).ravel()[:4]]


def _run(config: RunConfig, sink: ResultFiles) -> CommandResult:
    settings = get_settings()
    step, tolerance = settings.gradcheck_step, settings.gradcheck_tolerance
    base = config.seeds[0]
    records: list[dict[str, Any]] = []
    failures: list[str] = []
    worst = dict.fromkeys(TERMS, 0.0)

    for seed in range(base, base + config.gradcheck_instances):
        f, terms = random_instance(seed)
        for term, objective in terms.items():
            if config.inject_fault:
                objective = _flip_sign(objective)
            error, analytic, numeric = check_gradient(objective, f, step)
            passed = error < tolerance
            worst[term] = max(worst[term], error)
            records.append(
                {
                    "command": "gradcheck",
                    "term": term,
                    "seed": seed,
                    "u": int(f.shape[0]),
                    "n": int(f.shape[1]),
                    "rel_error": error,
                    "passed": passed,
                }
            )
            if not passed:
                failures.append(
                    f"term={term} seed={seed} rel_error={error:.3e} "
                    f"analytic={_preview(analytic)} numeric={_preview(numeric)}"
                )
                logger.warning("gradcheck.failed", term=term, seed=seed, rel_error=error)

    records.extend(
        {
            "command": "gradcheck",
            "term": term,
            "seed": None,
            "max_rel_error": worst[term],
            "instances": config.gradcheck_instances,
            "passed": worst[term] < tolerance,
        }
        for term in TERMS
    )
    sink.write_records("results.jsonl", records)
    summary = format_table(
        ["term", "max rel. error", "status"],
        [[term, f"{worst[term]:.2e}", "ok" if worst[term] < tolerance else "FAIL"] for term in TERMS],
    )
    if failures:
        return CommandResult(
            success=False,
            records=records,
            summary=summary,
            error=f"{len(failures)} gradient check(s) failed:\n" + "\n".join(failures),
        )
    return CommandResult(success=True, records=records, summary=summary)


def gradcheck_impl(config: RunConfig) -> CommandResult:
    """Implementation of the gradcheck command; never raises."""
    return execute("gradcheck", config, _run)
