"""Exception hierarchy shared by all layers."""

from __future__ import annotations


class ErrsslError(Exception):
    """Base class for every error raised by errssl."""


class DatasetError(ErrsslError, ValueError):
    """Malformed or unusable dataset / relation-label input."""

    def __init__(self, message: str, *, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SplitError(ErrsslError, ValueError):
    """A split or relation-label sample cannot be drawn."""


class GraphError(ErrsslError, ValueError):
    """Invalid graph construction or Laplacian request."""


class EigensolverError(ErrsslError, RuntimeError):
    def __init__(self, message: str, *, residual: float | None = None) -> None:
        self.residual = residual
        if residual is not None:
            message = f"{message} (max residual {residual:.3e})"
        super().__init__(message)


class SingularSystemError(ErrsslError, ValueError):
    """The IRR linear system has a nontrivial nullspace."""


class ConfigError(ErrsslError, ValueError):
    """Conflicting or invalid run configuration."""


class ValidationFailedError(ErrsslError, RuntimeError):
    """Every configuration of a hyper-parameter grid failed."""
