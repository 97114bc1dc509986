"""`bench`: solve timings across u and the error/time trade-off across |N_K|."""

from __future__ import annotations

import time
from typing import Any

import numpy as np
import structlog

from ..application.use_cases.solve_err_classification import SolveERRClassification
from ..application.use_cases.solve_irr import SolveIRR
from ..config.run_config import RunConfig
from ..domain.dataset import DataSet, decode_outputs, make_split, target_encoding
from ..domain.evaluation import classification_error
from ..domain.graph import LaplacianOp
from ..domain.relreg import RelationshipKernel, SparsityPattern, adaptive_sigma_f, sparsity_pattern
from ..errors import ConfigError
from ..infrastructure.adapters.result_files import ResultFiles
from ..models import CommandResult, KernelMode
from .classify import irr_err_configs
from .common import (
    DENSIFICATION_NOTE,
    build_graph,
    build_operator,
    check_sparsity,
    execute,
    format_table,
    load_dataset,
    mean_std,
)

logger = structlog.get_logger(__name__)

DEFAULT_SOURCE = "synthetic:digits-like?n=2000&features=64&classes=10&seed=0"


def _outputs(ds: DataSet) -> tuple[int, KernelMode]:
    n = 1 if ds.n_classes == 2 else ds.n_classes
    return n, KernelMode.SCALAR if n == 1 else KernelMode.VECTOR


def _timed_solves(
    ds: DataSet, op: LaplacianOp, config: RunConfig, seed: int, pattern: SparsityPattern | None
) -> dict[str, Any]:
    n, mode = _outputs(ds)
    split = make_split(ds, config.n_labeled, config.n_valid, seed, per_class=config.per_class)
    t, h = target_encoding(split, n)

    started = time.perf_counter()
    f_irr = SolveIRR(op)(t, h, config.lambda1)
    irr_s = time.perf_counter() - started

    sigma = config.sigma_f if config.sigma_f is not None else adaptive_sigma_f(f_irr)
    _, err_config = irr_err_configs(config, sigma)
    kernel = RelationshipKernel(sigma_f_sq=err_config.sigma_f_sq, mode=mode)
    started = time.perf_counter()
    solution = SolveERRClassification(op, kernel, pattern)(t, h, err_config)
    err_s = time.perf_counter() - started

    truth = ds.require_labels()
    return {
        "irr_error": classification_error(decode_outputs(f_irr), truth, split.unlabeled).error_rate,
        "err_error": classification_error(decode_outputs(solution.f), truth, split.unlabeled).error_rate,
        "irr_s": irr_s,
        "err_s": err_s,
        "iterations": solution.iterations_used,
        "err_step_s": err_s / max(solution.iterations_used, 1),
    }


def loglog_slope(sizes: list[int], seconds: list[float]) -> float:
    """Least-squares slope of log(seconds) against log(u)."""
    slope, _ = np.polyfit(np.log(sizes), np.log(seconds), 1)
    return float(slope)


def _run(config: RunConfig, sink: ResultFiles) -> CommandResult:
    check_sparsity(config)
    if config.p != 1 and config.nk_sweep:
        raise ConfigError(DENSIFICATION_NOTE)
    ds = load_dataset(config, default=DEFAULT_SOURCE)
    ds.require_labels()
    seed = config.seeds[0]
    records: list[dict[str, Any]] = []

    step_times: list[float] = []
    sizes = [size for size in sorted(config.sizes) if size <= ds.u]
    for size in sizes:
        subset = ds.subset(np.arange(size), name=f"{ds.name}[:{size}]")
        sized = config.model_copy(update={"knn": min(config.knn, size - 1)})
        op = build_operator(build_graph(subset, sized), config)
        timing = _timed_solves(subset, op, config, seed, None)
        step_times.append(timing["err_step_s"])
        records.append({"command": "bench", "kind": "timing", "u": size, "seed": seed, **timing})
        logger.info("bench.size_done", u=size, err_step_s=timing["err_step_s"])
    slope = loglog_slope(sizes, step_times) if len(sizes) >= 2 else None
    if slope is not None:
        records.append({"command": "bench", "kind": "slope", "sizes": sizes, "slope": slope})

    op = build_operator(build_graph(ds, config), config)
    irr_errors: list[float] = []
    errors: dict[str, list[float]] = {}
    for nk in [*sorted(config.nk_sweep), None]:
        label = "full" if nk is None else str(nk)
        pattern = None if nk is None or nk >= ds.u else sparsity_pattern(ds.points, nk)
        for run_seed in config.seeds:
            timing = _timed_solves(ds, op, config, run_seed, pattern)
            errors.setdefault(label, []).append(timing["err_error"])
            if nk is None:
                irr_errors.append(timing["irr_error"])
            records.append(
                {
                    "command": "bench",
                    "kind": "sparsity",
                    "nk": label,
                    "u": ds.u,
                    "seed": run_seed,
                    "error": timing["err_error"],
                    "irr_error": timing["irr_error"],
                    "err_s": timing["err_s"],
                    "iterations": timing["iterations"],
                }
            )
        logger.info("bench.nk_done", nk=label, mean_error=mean_std(errors[label])[0])

    sink.write_records("results.jsonl", records)
    rows: list[list[Any]] = [["IRR", *mean_std(irr_errors)]]
    rows.extend([label, *mean_std(values)] for label, values in errors.items())
    summary = format_table(["|N_K|", "mean error", "std"], rows)
    if slope is not None:
        summary.append(f"log-log slope of ERR step time vs u: {slope:.2f}")
    return CommandResult(success=True, records=records, summary=summary)


def bench_impl(config: RunConfig) -> CommandResult:
    """Implementation of the bench command; never raises."""
    return execute("bench", config, _run)
