"""Use case entrypoints."""

from .classification_pipeline import ClassificationPipeline
from .cluster_embedding import ClusterEmbedding
from .solve_err_classification import SolveERRClassification, solve_err_classification
from .solve_err_embedding import SolveERREmbedding, kernel_for, solve_err_embedding
from .solve_irr import SolveIRR, solve_irr
from .tune_relationship import TUNING_COLUMNS, TuneRelationship, TuningRow
from .validate_hyperparams import (
    VALIDATION_COLUMNS,
    StagedResult,
    ValidateHyperparams,
    ValidationRow,
    staged_search,
    validate_hyperparams,
)

__all__ = [
    "TUNING_COLUMNS",
    "VALIDATION_COLUMNS",
    "ClassificationPipeline",
    "ClusterEmbedding",
    "SolveERRClassification",
    "SolveERREmbedding",
    "SolveIRR",
    "StagedResult",
    "TuneRelationship",
    "TuningRow",
    "ValidateHyperparams",
    "ValidationRow",
    "kernel_for",
    "solve_err_classification",
    "solve_err_embedding",
    "solve_irr",
    "staged_search",
    "validate_hyperparams",
]
