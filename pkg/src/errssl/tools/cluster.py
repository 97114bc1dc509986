"""`cluster`: constrained spectral clustering with relationship labels, swept over s_R."""

from __future__ import annotations

from typing import Any

import numpy as np
import structlog

from ..application.use_cases.cluster_embedding import ClusterEmbedding
from ..application.use_cases.solve_err_embedding import SolveERREmbedding, kernel_for
from ..application.use_cases.tune_relationship import (
    TUNING_COLUMNS,
    RelationshipPair,
    TuneRelationship,
)
from ..config.run_config import RunConfig
from ..di.container import get_settings
from ..domain.evaluation import Clustering, clustering_error
from ..domain.relreg import sparsity_pattern
from ..infrastructure.adapters.result_files import ResultFiles
from ..models import CommandResult, EnergyConfig
from ..utils.cg import Solution
from .common import (
    build_graph,
    build_operator,
    check_sparsity,
    effective_lambda2,
    execute,
    format_table,
    load_dataset,
    mean_std,
    relation_labels,
    relation_sweep,
    tuning_pairs,
    with_pair,
)

logger = structlog.get_logger(__name__)


def _run(config: RunConfig, sink: ResultFiles) -> CommandResult:
    check_sparsity(config)
    ds = load_dataset(config)
    truth = ds.require_labels()
    k = config.clusters or ds.n_classes
    dim = config.dim or max(1, k - 1)
    graph = build_graph(ds, config)
    if config.dump_graph:
        sink.write_graph("graph.txt", graph)
    op = build_operator(graph, config)
    pattern = sparsity_pattern(ds.points, config.nk) if config.nk else None
    embed = SolveERREmbedding(op, pattern, dense_limit=get_settings().dense_eigen_limit)
    cluster = ClusterEmbedding(graph, restarts=config.restarts, plain_init=config.plain_init)

    t_spec = embed.spectral_target(dim)

    def refine(
        run: RunConfig, s_r: int, seed: int
    ) -> tuple[EnergyConfig, Solution, Clustering, int]:
        kernel = kernel_for(t_spec, run.sigma_f)
        labels = relation_labels(ds, run, s_r, seed)
        energy = run.energy_config(
            lambda1=0.0,
            lambda2=effective_lambda2(run, labels.s_r),
            sigma_f_sq=kernel.sigma_f_sq,
        )
        solution = embed(t_spec, energy, labels, kernel)
        return energy, solution, cluster(solution.f, k, seed), labels.s_r

    pairs = tuning_pairs(config)
    if pairs:

        def mean_ncut(pair: RelationshipPair) -> float:
            run = with_pair(config, pair)
            ncuts = [refine(run, config.tune_sr, seed)[2].ncut for seed in config.seeds]
            return float(np.mean(ncuts))

        best, rows = TuneRelationship(mean_ncut, config.tune_sr)(pairs)
        config = with_pair(config, best)
        sink.write_table("tuning.csv", TUNING_COLUMNS, [row.as_row() for row in rows])

    cells: list[dict[str, Any]] = []
    traces: list[dict[str, Any]] = []
    for seed in config.seeds:
        original = cluster(t_spec, k, seed)
        metrics = clustering_error(original.assignment, truth)
        cells.append(
            {
                "method": "Original",
                "seed": seed,
                "s_r": 0,
                "error": metrics.error_rate,
                "n_errors": metrics.n_errors,
                "ncut": original.ncut,
                "restart": original.restart,
            }
        )

    sweep = relation_sweep(config)
    for s_r in sweep:
        for seed in config.seeds:
            energy, solution, clustering, used = refine(config, s_r, seed)
            metrics = clustering_error(clustering.assignment, truth)
            cells.append(
                {
                    "method": "ERR",
                    "seed": seed,
                    "s_r": used,
                    "error": metrics.error_rate,
                    "n_errors": metrics.n_errors,
                    "ncut": clustering.ncut,
                    "restart": clustering.restart,
                    "lambda2": energy.lambda2,
                    "sigma_f_sq": energy.sigma_f_sq,
                    "iterations": solution.iterations_used,
                    "converged": solution.converged,
                    "final_energy": solution.energy,
                }
            )
            traces.extend(solution.trace_records(method="ERR", seed=seed, s_r=used))
            logger.info("cluster.cell_done", seed=seed, s_r=used, error=metrics.error_rate)
        if config.relations:
            break

    groups: dict[tuple[str, int], list[float]] = {}
    for cell in cells:
        groups.setdefault((cell["method"], cell["s_r"]), []).append(cell["error"])
    stats = {key: mean_std(values) for key, values in groups.items()}
    records = [
        {"command": "cluster", "k": k, "dim": dim, **cell, "mean": stats[(cell["method"], cell["s_r"])][0]}
        for cell in cells
    ]

    sink.write_records("results.jsonl", records)
    sink.write_records("traces.jsonl", traces)
    summary = format_table(
        ["method", "s_R", "mean error", "std"],
        [[method, s_r, mean, std] for (method, s_r), (mean, std) in stats.items()],
    )
    return CommandResult(success=True, records=records, summary=summary)


def cluster_impl(config: RunConfig) -> CommandResult:
    """Implementation of the cluster command; never raises."""
    return execute("cluster", config, _run)
