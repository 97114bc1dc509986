"""Process-level settings read from the environment with pydantic-settings."""

from __future__ import annotations

from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Logging and numerical limits, overridable through environment variables."""

    log_level: str = Field(default="INFO", description="Python logging level")
    log_format: Literal["kv", "json"] = Field(
        default="kv", description="Renderer for structured log lines on stderr"
    )
    dense_eigen_limit: int = Field(
        default=5000,
        gt=1,
        description="Largest graph handled by the dense symmetric eigensolver",
    )
    gradcheck_step: float = Field(
        default=1e-5, gt=0, description="Central finite-difference step"
    )
    gradcheck_tolerance: float = Field(
        default=1e-5, gt=0, description="Relative error accepted by gradcheck"
    )

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Normalize and validate LOG_LEVEL.

        TRACE is accepted as an alias of DEBUG.
        """
        valid_levels = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        normalized = v.upper()
        if normalized == "TRACE":
            return "DEBUG"
        if normalized not in valid_levels:
            raise ValueError(
                f"Invalid log level: {v}. Must be one of {valid_levels} or 'TRACE'"
            )
        return normalized


settings = Settings()
