"""Run configuration: `key = value` files merged with command-line flags.

Precedence is flags > file > model defaults. The effective configuration is
written back in the same format so a run can be reproduced with `--config`.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..errors import ConfigError
from ..models import Command, EmbedVariant, EnergyConfig, GraphConfig, LaplacianKind


def _split_list(value: Any) -> Any:
    if value is None:
        return []
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    command: Command
    dataset: str | None = None
    data_format: str | None = Field(
        default=None, description="csv or libsvm; inferred from the suffix when unset"
    )
    label_col: str = "label"
    n_labeled: int = Field(default=50, ge=0)
    n_valid: int = Field(default=50, ge=0)
    per_class: bool = False
    seeds: list[int] = Field(default_factory=lambda: list(range(10)))
    knn: int = Field(default=10, ge=1)
    sigma_x: float | None = Field(default=None, gt=0)
    squared_distance: bool = False
    normalized: bool = True
    p: int = Field(default=1, ge=1)
    lambda1: float = Field(default=1.0, ge=0)
    lambda2: float = Field(default=1.0, ge=0)
    lambda2_prime: float | None = Field(default=None, ge=0)
    lambda3: float = Field(default=10.0, ge=0)
    sigma_f: float | None = Field(default=None, gt=0)
    cg_steps: int = Field(default=50, ge=0)
    grad_tol: float = Field(default=1e-8, gt=0)
    nk: int | None = Field(default=None, ge=1)
    relations: str | None = None
    sr: int | None = Field(default=None, ge=0)
    sr_sweep: list[int] = Field(default_factory=list)
    dim: int | None = Field(
        default=None, ge=1, description="Output columns; 2 for embed, k - 1 for cluster when unset"
    )
    clusters: int | None = Field(default=None, ge=2)
    restarts: int = Field(default=10, ge=1)
    plain_init: bool = False
    variant: list[EmbedVariant] = Field(
        default_factory=lambda: [EmbedVariant.SPECTRAL, EmbedVariant.LABELS, EmbedVariant.ERR]
    )
    inject_fault: bool = False
    gradcheck_instances: int = Field(default=20, ge=1)
    nk_sweep: list[int] = Field(default_factory=lambda: [25, 50, 100, 200])
    sizes: list[int] = Field(default_factory=lambda: [250, 500, 1000])
    grid_lambda1: list[float] = Field(default_factory=list)
    grid_lambda2: list[float] = Field(default_factory=list)
    grid_sigma_f: list[float] = Field(default_factory=list)
    grid_knn: list[int] = Field(default_factory=list)
    grid_sigma_x: list[float] = Field(default_factory=list)
    grid_lambda2_prime: list[float] = Field(default_factory=list)
    tune_sr: int = Field(
        default=250, ge=1, description="s_R at which cluster/embed tune (sigma_f^2, lambda2')"
    )
    dump_graph: bool = False
    out: str = "results"

    @field_validator("seeds", mode="before")
    @classmethod
    def _parse_seeds(cls, v: Any) -> Any:
        """Accept `3`, `0,2,5` or an inclusive range `0-9`."""
        if isinstance(v, int):
            return [v]
        if isinstance(v, str):
            seeds: list[int] = []
            for token in _split_list(v):
                lo, sep, hi = token.partition("-")
                if sep and lo:
                    seeds.extend(range(int(lo), int(hi) + 1))
                else:
                    seeds.append(int(token))
            return seeds
        return v

    @field_validator(
        "sr_sweep",
        "nk_sweep",
        "sizes",
        "grid_lambda1",
        "grid_lambda2",
        "grid_sigma_f",
        "grid_knn",
        "grid_sigma_x",
        "grid_lambda2_prime",
        mode="before",
    )
    @classmethod
    def _parse_lists(cls, v: Any) -> Any:
        return _split_list(v)

    @field_validator("variant", mode="before")
    @classmethod
    def _parse_variant(cls, v: Any) -> Any:
        items = _split_list(v)
        if items == ["all"]:
            return [EmbedVariant.SPECTRAL, EmbedVariant.LABELS, EmbedVariant.ERR]
        return items

    @field_validator("grid_knn")
    @classmethod
    def _positive_knn(cls, v: list[int]) -> list[int]:
        if any(k < 1 for k in v):
            raise ValueError("grid_knn values must be at least 1")
        return v

    @field_validator("grid_sigma_x", "grid_sigma_f")
    @classmethod
    def _positive_bandwidths(cls, v: list[float]) -> list[float]:
        if any(s <= 0 for s in v):
            raise ValueError("bandwidth grid values must be positive")
        return v

    @field_validator("seeds")
    @classmethod
    def _seeds_nonempty(cls, v: list[int]) -> list[int]:
        if not v:
            raise ValueError("at least one seed is required")
        return v

    def graph_config(self) -> GraphConfig:
        return GraphConfig(
            k_n=self.knn,
            sigma_x_sq=self.sigma_x,
            kind=LaplacianKind.SYMMETRIC if self.normalized else LaplacianKind.UNNORMALIZED,
            squared_distance=self.squared_distance,
            p=self.p,
        )

    def energy_config(self, **overrides: Any) -> EnergyConfig:
        values: dict[str, Any] = {
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "lambda3": self.lambda3,
            "p": self.p,
            "sigma_f_sq": self.sigma_f if self.sigma_f is not None else 1.0,
            "cg_steps": self.cg_steps,
            "grad_tol": self.grad_tol,
            "sparsity": self.nk,
        }
        values.update(overrides)
        return EnergyConfig(**values)


def parse_key_values(text: str) -> dict[str, str | None]:
    """Parse `key = value` lines; `#` starts a comment, an empty value means unset."""
    values: dict[str, str | None] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        values[key] = value or None
    return values


def load_run_config(
    path: str | Path | None = None, overrides: dict[str, Any] | None = None
) -> RunConfig:
    """Build a RunConfig from an optional file and flag overrides (flags win)."""
    merged: dict[str, Any] = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read config file {path}: {e}") from e
        merged.update({k: v for k, v in parse_key_values(text).items() if v is not None})
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    try:
        return RunConfig(**merged)
    except ValidationError as e:
        raise ConfigError(str(e)) from e


def _render(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return ",".join(_render(v) for v in value)
    if hasattr(value, "value"):
        return str(value.value)
    return repr(value) if isinstance(value, float) else str(value)


def dump_run_config(config: RunConfig) -> str:
    """Render the effective configuration as a `key = value` file."""
    lines = [f"{name} = {_render(getattr(config, name))}" for name in RunConfig.model_fields]
    return "\n".join(lines) + "\n"
