"""Data models shared across layers."""

from __future__ import annotations

import hashlib
from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator


class LaplacianKind(str, Enum):
    UNNORMALIZED = "unnormalized"
    SYMMETRIC = "symmetric-normalized"


class KernelMode(str, Enum):
    SCALAR = "scalar"
    VECTOR = "vector"


class RelationKind(str, Enum):
    MUST = "must"
    CANNOT = "cannot"


class Command(str, Enum):
    CLASSIFY = "classify"
    CLUSTER = "cluster"
    EMBED = "embed"
    GRADCHECK = "gradcheck"
    BENCH = "bench"


class EmbedVariant(str, Enum):
    # spectral embedding only
    SPECTRAL = "spectral"
    # spectral target + relation-label loss + lambda1 graph term, no relationship term
    LABELS = "labels"
    # full explicit relationship regularization
    ERR = "err"


class GraphConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    k_n: int = Field(default=10, ge=1, description="kNN neighbourhood size")
    sigma_x_sq: float | None = Field(
        default=None, gt=0, description="Bandwidth; None selects the adaptive rule"
    )
    kind: LaplacianKind = LaplacianKind.SYMMETRIC
    squared_distance: bool = False
    p: int = Field(default=1, ge=1, description="Laplacian power of the regularizer")


class EnergyConfig(BaseModel):
    """Weights and optimizer budget of one objective."""

    model_config = ConfigDict(frozen=True)

    lambda1: float = Field(default=1.0, ge=0)
    lambda2: float = Field(default=0.0, ge=0)
    lambda3: float = Field(default=0.0, ge=0)
    p: int = Field(default=1, ge=1)
    sigma_f_sq: float = Field(default=1.0, gt=0)
    cg_steps: int = Field(default=50, ge=0)
    grad_tol: float = Field(default=1e-8, gt=0)
    sparsity: int | None = Field(default=None, ge=1, description="|N_K|; None is dense")

    def config_hash(self) -> str:
        payload = self.model_dump_json().encode()
        return hashlib.sha1(payload).hexdigest()[:12]

    def with_overrides(self, **changes: Any) -> EnergyConfig:
        return self.model_validate({**self.model_dump(), **changes})


class Metrics(BaseModel):
    n_errors: int = Field(ge=0)
    n_evaluated: int = Field(ge=1)
    error_rate: float = Field(ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _rate_matches_counts(self) -> Metrics:
        if self.n_errors > self.n_evaluated:
            raise ValueError("n_errors cannot exceed n_evaluated")
        expected = self.n_errors / self.n_evaluated
        if abs(self.error_rate - expected) > 1e-12:
            raise ValueError("error_rate must equal n_errors / n_evaluated")
        return self

    @classmethod
    def from_counts(cls, n_errors: int, n_evaluated: int) -> Metrics:
        return cls(n_errors=n_errors, n_evaluated=n_evaluated, error_rate=n_errors / n_evaluated)


class CommandResult(BaseModel):
    success: bool = Field(description="Whether the command completed without error")
    records: list[dict[str, Any]] = Field(default_factory=list)
    summary: list[str] = Field(default_factory=list)
    error: str | None = None
