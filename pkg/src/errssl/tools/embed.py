"""`embed`: low-dimensional embeddings with relationship labels, scored by leave-one-out 1-NN."""

from __future__ import annotations

from typing import Any

import numpy as np
import structlog

from ..application.use_cases.solve_err_embedding import SolveERREmbedding, kernel_for
from ..application.use_cases.tune_relationship import (
    TUNING_COLUMNS,
    RelationshipPair,
    TuneRelationship,
)
from ..config.run_config import RunConfig
from ..di.container import get_settings
from ..domain.dataset import RelationLabelSet
from ..domain.evaluation import loo_1nn_error
from ..domain.relreg import RelationshipKernel, sparsity_pattern
from ..errors import ConfigError
from ..infrastructure.adapters.result_files import ResultFiles
from ..models import CommandResult, EmbedVariant, EnergyConfig
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


def variant_config(
    variant: EmbedVariant, config: RunConfig, kernel: RelationshipKernel, s_r: int
) -> EnergyConfig | None:
    """Energy weights of one variant; None means the spectral embedding as is."""
    if variant is EmbedVariant.SPECTRAL:
        return None
    if variant is EmbedVariant.LABELS:
        return config.energy_config(lambda2=0.0, sigma_f_sq=kernel.sigma_f_sq)
    return err_config(config, kernel, s_r)


def err_config(config: RunConfig, kernel: RelationshipKernel, s_r: int) -> EnergyConfig:
    return config.energy_config(
        lambda1=0.0, lambda2=effective_lambda2(config, s_r), sigma_f_sq=kernel.sigma_f_sq
    )


def _run(config: RunConfig, sink: ResultFiles) -> CommandResult:
    check_sparsity(config)
    dim = config.dim or 2
    if dim < 2:
        raise ConfigError(f"embed needs at least 2 output dimensions, got {dim}")
    ds = load_dataset(config)
    truth = ds.require_labels()
    graph = build_graph(ds, config)
    if config.dump_graph:
        sink.write_graph("graph.txt", graph)
    op = build_operator(graph, config)
    pattern = sparsity_pattern(ds.points, config.nk) if config.nk else None
    embed = SolveERREmbedding(op, pattern, dense_limit=get_settings().dense_eigen_limit)
    t_spec = embed.spectral_target(dim)

    pairs = tuning_pairs(config)
    if pairs:

        def mean_loo_error(pair: RelationshipPair) -> float:
            run = with_pair(config, pair)
            kernel = kernel_for(t_spec, run.sigma_f)
            errors = []
            for seed in config.seeds:
                labels = relation_labels(ds, run, config.tune_sr, seed)
                energy = err_config(run, kernel, labels.s_r)
                f = embed(t_spec, energy, labels, kernel).f
                errors.append(loo_1nn_error(f, truth).error_rate)
            return float(np.mean(errors))

        best, rows = TuneRelationship(mean_loo_error, config.tune_sr)(pairs)
        config = with_pair(config, best)
        sink.write_table("tuning.csv", TUNING_COLUMNS, [row.as_row() for row in rows])

    kernel = kernel_for(t_spec, config.sigma_f)

    cells: list[dict[str, Any]] = []
    traces: list[dict[str, Any]] = []
    for s_r in relation_sweep(config):
        for seed in config.seeds:
            labels = (
                relation_labels(ds, config, s_r, seed)
                if set(config.variant) != {EmbedVariant.SPECTRAL}
                else RelationLabelSet.empty()
            )
            for variant in config.variant:
                energy = variant_config(variant, config, kernel, labels.s_r)
                solution: Solution | None = None
                if energy is None:
                    f = t_spec
                else:
                    solution = embed(t_spec, energy, labels, kernel)
                    f = solution.f
                    traces.extend(
                        solution.trace_records(
                            method=variant.value, seed=seed, s_r=labels.s_r
                        )
                    )
                metrics = loo_1nn_error(f, truth)
                sink.write_coordinates(
                    f"embedding_{variant.value}_sr{labels.s_r}_seed{seed}.csv", f, truth
                )
                cell: dict[str, Any] = {
                    "method": variant.value,
                    "seed": seed,
                    "s_r": labels.s_r,
                    "error": metrics.error_rate,
                    "n_errors": metrics.n_errors,
                }
                if solution is not None and energy is not None:
                    cell.update(
                        lambda1=energy.lambda1,
                        lambda2=energy.lambda2,
                        lambda3=energy.lambda3,
                        sigma_f_sq=energy.sigma_f_sq,
                        iterations=solution.iterations_used,
                        converged=solution.converged,
                        final_energy=solution.energy,
                        moved=float(np.linalg.norm(solution.f - t_spec)),
                    )
                cells.append(cell)
                logger.info(
                    "embed.cell_done",
                    variant=variant.value,
                    seed=seed,
                    s_r=labels.s_r,
                    error=metrics.error_rate,
                )
        if config.relations:
            break

    groups: dict[tuple[str, int], list[float]] = {}
    for cell in cells:
        groups.setdefault((cell["method"], cell["s_r"]), []).append(cell["error"])
    stats = {key: mean_std(values) for key, values in groups.items()}
    records = [
        {"command": "embed", "dim": dim, **cell, "mean": stats[(cell["method"], cell["s_r"])][0]}
        for cell in cells
    ]
    sink.write_records("results.jsonl", records)
    sink.write_records("traces.jsonl", traces)
    summary = format_table(
        ["variant", "s_R", "mean LOO 1-NN error", "std"],
        [[method, s_r, mean, std] for (method, s_r), (mean, std) in stats.items()],
    )
    return CommandResult(success=True, records=records, summary=summary)


def embed_impl(config: RunConfig) -> CommandResult:
    """Implementation of the embed command; never raises."""
    return execute("embed", config, _run)
