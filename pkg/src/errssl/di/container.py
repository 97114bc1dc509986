"""Minimal DI container functions to construct services."""

from __future__ import annotations

from pathlib import Path

from ..config.run_config import RunConfig
from ..config.settings import Settings
from ..infrastructure.adapters.dataset_files import FileDatasetSource
from ..infrastructure.adapters.result_files import ResultFiles


def get_settings() -> Settings:
    return Settings()


def get_dataset_source(config: RunConfig | None = None) -> FileDatasetSource:
    if config is None:
        return FileDatasetSource()
    return FileDatasetSource(label_col=config.label_col, data_format=config.data_format)


def get_results_sink(out: str | Path) -> ResultFiles:
    return ResultFiles(out)
