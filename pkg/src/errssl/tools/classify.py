"""`classify`: IRR versus ERR transductive classification over seeded splits."""

from __future__ import annotations

from typing import Any

import structlog

from ..application.use_cases.classification_pipeline import ClassificationPipeline
from ..application.use_cases.solve_err_classification import SolveERRClassification
from ..application.use_cases.solve_irr import SolveIRR
from ..application.use_cases.validate_hyperparams import VALIDATION_COLUMNS, ValidateHyperparams
from ..config.run_config import RunConfig
from ..domain.dataset import decode_outputs, make_split, target_encoding
from ..domain.evaluation import classification_error, reduction_of_error_rate
from ..domain.graph import LaplacianOp
from ..domain.relreg import RelationshipKernel, adaptive_sigma_f, sparsity_pattern
from ..infrastructure.adapters.result_files import ResultFiles
from ..models import CommandResult, EnergyConfig, GraphConfig, KernelMode
from .common import (
    build_graph,
    build_operator,
    check_sparsity,
    execute,
    format_table,
    graph_grid,
    load_dataset,
    mean_std,
)

logger = structlog.get_logger(__name__)


def _uses_grid(config: RunConfig) -> bool:
    return bool(
        config.grid_lambda1
        or config.grid_lambda2
        or config.grid_sigma_f
        or config.grid_knn
        or config.grid_sigma_x
    )


def _run(config: RunConfig, sink: ResultFiles) -> CommandResult:
    check_sparsity(config)
    ds = load_dataset(config)
    truth = ds.require_labels()
    graph = build_graph(ds, config)
    if config.dump_graph:
        sink.write_graph("graph.txt", graph)
    op = build_operator(graph, config)
    n_outputs = 1 if ds.n_classes == 2 else ds.n_classes
    mode = KernelMode.SCALAR if n_outputs == 1 else KernelMode.VECTOR
    pattern = sparsity_pattern(ds.points, config.nk) if config.nk else None
    pipeline = ClassificationPipeline(op, n_outputs, pattern)

    operators: dict[GraphConfig, LaplacianOp] = {}
    for gc in graph_grid(config):
        operators[gc] = build_operator(build_graph(ds, config, gc), config)
        logger.debug("classify.graph_candidate", k_n=gc.k_n, sigma_x_sq=gc.sigma_x_sq)
    candidates = [
        (gc, ClassificationPipeline(candidate_op, n_outputs, pattern))
        for gc, candidate_op in operators.items()
    ]

    per_seed: dict[str, dict[int, Any]] = {"IRR": {}, "ERR": {}}
    best_case: dict[str, dict[int, float]] = {"IRR-BC": {}, "ERR-BC": {}}
    traces: list[dict[str, Any]] = []
    validation_rows: list[list[Any]] = []

    for seed in config.seeds:
        split = make_split(ds, config.n_labeled, config.n_valid, seed, per_class=config.per_class)
        t, h = target_encoding(split, n_outputs)
        f_irr = SolveIRR(op)(t, h, config.lambda1)
        default_sigma = config.sigma_f if config.sigma_f is not None else adaptive_sigma_f(f_irr)
        irr_config, err_config = irr_err_configs(config, default_sigma)
        seed_op, seed_graph = op, config.graph_config()

        if _uses_grid(config):
            irr_grid = [
                irr_config.with_overrides(lambda1=value)
                for value in (config.grid_lambda1 or [config.lambda1])
            ]
            err_grid = [
                (sigma, lam)
                for sigma in (config.grid_sigma_f or [default_sigma])
                for lam in (config.grid_lambda2 or [config.lambda2])
            ]
            staged = ValidateHyperparams(pipeline, truth).staged(
                irr_grid, err_grid, split, graphs=candidates
            )
            irr_config, err_config = staged.best_irr, staged.best_err
            if staged.best_graph is not None:
                seed_op, seed_graph = operators[staged.best_graph], staged.best_graph
            validation_rows.extend([seed, *row.as_row()] for row in staged.rows)
            best_case["IRR-BC"][seed] = staged.best_case("irr")
            best_case["ERR-BC"][seed] = staged.best_case("err")
            f_irr = SolveIRR(seed_op)(t, h, irr_config.lambda1)

        kernel = RelationshipKernel(sigma_f_sq=err_config.sigma_f_sq, mode=mode)
        solution = SolveERRClassification(seed_op, kernel, pattern)(t, h, err_config)

        evaluation = split.unlabeled
        irr_metrics = classification_error(decode_outputs(f_irr), truth, evaluation)
        err_metrics = classification_error(decode_outputs(solution.f), truth, evaluation)
        per_seed["IRR"][seed] = (irr_metrics, irr_config, seed_graph, None)
        per_seed["ERR"][seed] = (err_metrics, err_config, seed_graph, solution)
        traces.extend(solution.trace_records(method="ERR", seed=seed))
        logger.info(
            "classify.seed_done",
            seed=seed,
            k_n=seed_graph.k_n,
            irr_error=irr_metrics.error_rate,
            err_error=err_metrics.error_rate,
        )

    means = {
        method: mean_std(cell[0].error_rate for cell in cells.values())
        for method, cells in per_seed.items()
    }
    rer = reduction_of_error_rate(means["IRR"][0], means["ERR"][0])

    records: list[dict[str, Any]] = []
    for method, cells in per_seed.items():
        for seed, (metrics, energy, gc, solution) in cells.items():
            record: dict[str, Any] = {
                "command": "classify",
                "method": method,
                "seed": seed,
                "error": metrics.error_rate,
                "n_errors": metrics.n_errors,
                "n_evaluated": metrics.n_evaluated,
                "mean": means[method][0],
                "std": means[method][1],
                "rer": rer if method == "ERR" else None,
                "config_hash": energy.config_hash(),
                "k_n": gc.k_n,
                "sigma_x_sq": gc.sigma_x_sq,
                "lambda1": energy.lambda1,
                "lambda2": energy.lambda2,
                "sigma_f_sq": energy.sigma_f_sq,
            }
            if solution is not None:
                record.update(
                    iterations=solution.iterations_used,
                    converged=solution.converged,
                    initial_energy=solution.energy_trace[0],
                    final_energy=solution.energy,
                )
            records.append(record)

    table = [
        ["IRR", means["IRR"][0], means["IRR"][1], None],
        ["ERR", means["ERR"][0], means["ERR"][1], rer],
    ]
    if validation_rows:
        bc_means = {method: mean_std(errors.values()) for method, errors in best_case.items()}
        bc_rer = reduction_of_error_rate(bc_means["IRR-BC"][0], bc_means["ERR-BC"][0])
        for method, errors in best_case.items():
            records.extend(
                {
                    "command": "classify",
                    "method": method,
                    "seed": seed,
                    "error": error,
                    "mean": bc_means[method][0],
                    "std": bc_means[method][1],
                    "rer": bc_rer if method == "ERR-BC" else None,
                }
                for seed, error in errors.items()
            )
            table.append(
                [method, *bc_means[method], bc_rer if method == "ERR-BC" else None]
            )

    sink.write_records("results.jsonl", records)
    sink.write_records("traces.jsonl", traces)
    if validation_rows:
        sink.write_table("validation.csv", ["seed", *VALIDATION_COLUMNS], validation_rows)

    summary = format_table(["method", "mean error", "std", "RER %"], table)
    return CommandResult(success=True, records=records, summary=summary)


def classify_impl(config: RunConfig) -> CommandResult:
    """Implementation of the classify command; never raises."""
    return execute("classify", config, _run)


def irr_err_configs(config: RunConfig, sigma_f_sq: float) -> tuple[EnergyConfig, EnergyConfig]:
    """The (IRR, ERR) pair used when no validation grid is given."""
    return (
        config.energy_config(lambda2=0.0, sigma_f_sq=sigma_f_sq),
        config.energy_config(sigma_f_sq=sigma_f_sq),
    )
