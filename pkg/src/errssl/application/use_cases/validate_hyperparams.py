from __future__ import annotations

import time
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
import structlog

from ...domain.dataset import SupervisionSplit
from ...domain.evaluation import classification_error
from ...domain.ports.pipeline import PipelinePort
from ...errors import ValidationFailedError
from ...models import EnergyConfig, GraphConfig

logger = structlog.get_logger(__name__)

VALIDATION_COLUMNS = (
    "config_hash",
    "stage",
    "k_n",
    "sigma_x_sq",
    "lambda1",
    "lambda2",
    "sigma_f_sq",
    "p",
    "sparsity",
    "validation_error",
    "evaluation_error",
    "error",
)

# (graph parameters, pipeline solving on that graph); None is the run's own graph
GraphCandidate = tuple[GraphConfig | None, PipelinePort]


def _cell(value: Any) -> Any:
    return "" if value is None else value


@dataclass(frozen=True)
class ValidationRow:
    config: EnergyConfig
    stage: str
    validation_error: float | None
    evaluation_error: float | None
    runtime_s: float
    error: str | None = None
    graph: GraphConfig | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def as_row(self) -> list[Any]:
        """CSV cells in VALIDATION_COLUMNS order; wall-clock time stays in the log."""
        return [
            self.config.config_hash(),
            self.stage,
            "" if self.graph is None else self.graph.k_n,
            "" if self.graph is None else _cell(self.graph.sigma_x_sq),
            self.config.lambda1,
            self.config.lambda2,
            self.config.sigma_f_sq,
            self.config.p,
            _cell(self.config.sparsity),
            _cell(self.validation_error),
            _cell(self.evaluation_error),
            self.error or "",
        ]


@dataclass(frozen=True)
class StagedResult:
    best_irr: EnergyConfig
    best_err: EnergyConfig
    rows: list[ValidationRow]
    best_graph: GraphConfig | None = None

    def best_case(self, stage: str) -> float:
        """Lowest evaluation error over the rows of one stage (best-case selection)."""
        errors = [
            row.evaluation_error
            for row in self.rows
            if row.stage == stage and row.evaluation_error is not None
        ]
        if not errors:
            raise ValueError(f"no successful {stage!r} rows")
        return min(errors)


class ValidateHyperparams:
    """Train on the labeled set per config and pick the lowest validation error.

    Ties keep the earliest config in grid order. A failing config is recorded
    in the table and skipped; only a grid where every config fails is an error.
    """

    def __init__(self, pipeline: PipelinePort, truth: np.ndarray) -> None:
        self._pipeline = pipeline
        self._truth = np.asarray(truth, dtype=np.int64)

    def _evaluate(
        self,
        config: EnergyConfig,
        split: SupervisionSplit,
        stage: str,
        candidate: GraphCandidate | None = None,
    ) -> ValidationRow:
        graph, pipeline = candidate or (None, self._pipeline)
        started = time.perf_counter()
        try:
            pred = pipeline(config, split)
            validation = classification_error(pred, self._truth, split.validation)
            evaluation = classification_error(pred, self._truth, split.unlabeled)
        except Exception as e:
            logger.warning(
                "validation.config_failed",
                config_hash=config.config_hash(),
                stage=stage,
                error=str(e),
            )
            return ValidationRow(
                config=config,
                stage=stage,
                validation_error=None,
                evaluation_error=None,
                runtime_s=time.perf_counter() - started,
                error=f"{type(e).__name__}: {e}",
                graph=graph,
            )
        row = ValidationRow(
            config=config,
            stage=stage,
            validation_error=validation.error_rate,
            evaluation_error=evaluation.error_rate,
            runtime_s=time.perf_counter() - started,
            graph=graph,
        )
        logger.debug(
            "validation.config_done",
            config_hash=config.config_hash(),
            stage=stage,
            k_n=graph.k_n if graph else None,
            validation_error=row.validation_error,
            runtime_s=round(row.runtime_s, 6),
        )
        return row

    @staticmethod
    def _select(rows: list[ValidationRow], stage: str) -> ValidationRow:
        best: ValidationRow | None = None
        best_error = np.inf
        for row in rows:
            if row.validation_error is not None and row.validation_error < best_error:
                best, best_error = row, row.validation_error
        if best is None:
            raise ValidationFailedError(
                f"all {len(rows)} configurations failed; first error: {rows[0].error}"
            )
        logger.info(
            "validation.selected",
            stage=stage,
            config_hash=best.config.config_hash(),
            k_n=best.graph.k_n if best.graph else None,
            validation_error=best.validation_error,
            evaluated=len(rows),
        )
        return best

    def __call__(
        self, grid: Sequence[EnergyConfig], split: SupervisionSplit, *, stage: str = "grid"
    ) -> tuple[EnergyConfig, list[ValidationRow]]:
        if not grid:
            raise ValueError("hyper-parameter grid is empty")
        rows = [self._evaluate(config, split, stage) for config in grid]
        return self._select(rows, stage).config, rows

    def staged(
        self,
        irr_grid: Sequence[EnergyConfig],
        err_grid: Sequence[tuple[float, float]],
        split: SupervisionSplit,
        *,
        graphs: Sequence[GraphCandidate] = (),
    ) -> StagedResult:
        """Tune the graph and IRR parameters with lambda2 = 0, then (sigma_f^2, lambda2) on top.

        Each graph candidate is crossed with the IRR grid; the ERR stage runs on
        the winning graph only. Evaluates len(graphs or [own]) * len(irr_grid) +
        len(err_grid) configurations.
        """
        if not irr_grid:
            raise ValueError("hyper-parameter grid is empty")
        candidates: Sequence[GraphCandidate] = graphs or [(None, self._pipeline)]
        irr_rows = [
            self._evaluate(config.with_overrides(lambda2=0.0), split, "irr", candidate)
            for candidate in candidates
            for config in irr_grid
        ]
        best = self._select(irr_rows, "irr")
        if not err_grid:
            return StagedResult(
                best_irr=best.config, best_err=best.config, rows=irr_rows, best_graph=best.graph
            )
        winner = next(candidate for candidate in candidates if candidate[0] == best.graph)
        err_rows = [
            self._evaluate(
                best.config.with_overrides(sigma_f_sq=sigma_f_sq, lambda2=lambda2),
                split,
                "err",
                winner,
            )
            for sigma_f_sq, lambda2 in err_grid
        ]
        best_err = self._select(err_rows, "err")
        return StagedResult(
            best_irr=best.config,
            best_err=best_err.config,
            rows=irr_rows + err_rows,
            best_graph=best.graph,
        )


def validate_hyperparams(
    grid: Sequence[EnergyConfig],
    split: SupervisionSplit,
    pipeline: PipelinePort,
    truth: np.ndarray,
) -> tuple[EnergyConfig, list[ValidationRow]]:
    return ValidateHyperparams(pipeline, truth)(grid, split)


def staged_search(
    irr_grid: Sequence[EnergyConfig],
    err_grid: Sequence[tuple[float, float]],
    split: SupervisionSplit,
    pipeline: PipelinePort,
    truth: np.ndarray,
    graphs: Sequence[GraphCandidate] = (),
) -> StagedResult:
    return ValidateHyperparams(pipeline, truth).staged(irr_grid, err_grid, split, graphs=graphs)
