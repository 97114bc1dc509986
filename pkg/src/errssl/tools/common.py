"""Helpers shared by the command implementations."""

from __future__ import annotations

import time
from collections.abc import Callable, Iterable, Sequence
from typing import Any

import numpy as np
import structlog

from ..config.run_config import RunConfig, dump_run_config
from ..di.container import get_dataset_source, get_results_sink
from ..domain.dataset import DataSet, RelationLabelSet, sample_relation_labels
from ..domain.graph import Graph, LaplacianOp, knn_graph, laplacian
from ..errors import ConfigError
from ..infrastructure.adapters.result_files import ResultFiles
from ..models import CommandResult, GraphConfig

logger = structlog.get_logger(__name__)

DENSIFICATION_NOTE = (
    "relationship sparsity (--nk) requires p = 1: taking the power of a sparse "
    "Laplacian tends to produce a denser matrix"
)


def execute(
    name: str,
    config: RunConfig,
    body: Callable[[RunConfig, ResultFiles], CommandResult],
) -> CommandResult:
    """Write the effective config, run `body`, and turn any exception into a failed result."""
    started = time.perf_counter()
    try:
        sink = get_results_sink(config.out)
        sink.write_text("effective_config.txt", dump_run_config(config))
        result = body(config, sink)
    except Exception as e:
        logger.error("cli.command_failed", command=name, error=str(e))
        return CommandResult(success=False, error=f"{type(e).__name__}: {e}")
    logger.info(
        "cli.command_done",
        command=name,
        success=result.success,
        records=len(result.records),
        runtime_s=round(time.perf_counter() - started, 3),
    )
    return result


def load_dataset(config: RunConfig, default: str | None = None) -> DataSet:
    source = config.dataset or default
    if source is None:
        raise ConfigError("--dataset is required")
    return get_dataset_source(config).load_dataset(source)


def build_graph(ds: DataSet, config: RunConfig, gc: GraphConfig | None = None) -> Graph:
    gc = gc or config.graph_config()
    return knn_graph(ds.points, gc.k_n, gc.sigma_x_sq, squared_distance=gc.squared_distance)


def graph_grid(config: RunConfig) -> list[GraphConfig]:
    """Graph parameters crossed from --grid-knn and --grid-sigma-x; empty when neither is set."""
    if not (config.grid_knn or config.grid_sigma_x):
        return []
    base = config.graph_config()
    return [
        GraphConfig.model_validate({**base.model_dump(), "k_n": k_n, "sigma_x_sq": sigma_x_sq})
        for k_n in (config.grid_knn or [config.knn])
        for sigma_x_sq in (config.grid_sigma_x or [config.sigma_x])
    ]


def build_operator(graph: Graph, config: RunConfig, p: int | None = None) -> LaplacianOp:
    gc = config.graph_config()
    return laplacian(graph, gc.kind, p=gc.p if p is None else p)


def check_sparsity(config: RunConfig) -> None:
    if config.nk is not None and config.p > 1:
        raise ConfigError(DENSIFICATION_NOTE)


def relation_sweep(config: RunConfig) -> list[int]:
    if config.sr_sweep:
        return list(config.sr_sweep)
    return [config.sr if config.sr is not None else 0]


def relation_labels(ds: DataSet, config: RunConfig, s_r: int, seed: int) -> RelationLabelSet:
    """Labels from --relations when given, otherwise s_r pairs sampled from ground truth."""
    if config.relations:
        labels = get_dataset_source(config).load_relation_labels(config.relations, ds.u)
        if ds.labels is not None and not labels.consistent_with(ds.labels):
            logger.warning(
                "relations.contradict_ground_truth", path=config.relations, s_r=labels.s_r
            )
        return labels
    if s_r == 0:
        return RelationLabelSet.empty()
    return sample_relation_labels(ds, s_r, seed)


def effective_lambda2(config: RunConfig, s_r: int) -> float:
    """lambda2' / s_R when lambda2' is set, else the raw lambda2; zero without labels."""
    if s_r == 0:
        return 0.0
    if config.lambda2_prime is not None:
        return config.lambda2_prime / s_r
    return config.lambda2


def tuning_pairs(config: RunConfig) -> list[tuple[float | None, float | None]]:
    """(sigma_f^2, lambda2') pairs from --grid-sigma-f and --grid-lambda2-prime."""
    if not (config.grid_sigma_f or config.grid_lambda2_prime):
        return []
    return [
        (sigma_f, lambda2_prime)
        for sigma_f in (config.grid_sigma_f or [config.sigma_f])
        for lambda2_prime in (config.grid_lambda2_prime or [config.lambda2_prime])
    ]


def with_pair(config: RunConfig, pair: tuple[float | None, float | None]) -> RunConfig:
    sigma_f, lambda2_prime = pair
    return config.model_copy(update={"sigma_f": sigma_f, "lambda2_prime": lambda2_prime})


def mean_std(values: Iterable[float]) -> tuple[float, float]:
    array = np.asarray(list(values), dtype=np.float64)
    if array.size == 0:
        return float("nan"), float("nan")
    std = float(array.std(ddof=1)) if array.size > 1 else 0.0
    return float(array.mean()), std


def format_table(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> list[str]:
    """Fixed-width text table for the human-readable summary on stdout."""

    def render(value: Any) -> str:
        if isinstance(value, float):
            return f"{value:.4f}"
        return "-" if value is None else str(value)

    cells = [[render(v) for v in row] for row in rows]
    widths = [
        max(len(h), *(len(row[c]) for row in cells)) if cells else len(h)
        for c, h in enumerate(header)
    ]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths, strict=True))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend(
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths, strict=True)) for row in cells
    )
    return lines
