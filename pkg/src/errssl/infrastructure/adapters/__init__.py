"""Adapters implementing the domain ports."""

from .dataset_files import FileDatasetSource
from .result_files import ResultFiles

__all__ = ["FileDatasetSource", "ResultFiles"]
