"""Configuration utilities (12-factor friendly).

`settings` holds process-level options read from the environment; run-level
options (dataset, graph, energy, outputs) live in `RunConfig`.
"""

from .run_config import RunConfig, dump_run_config, load_run_config, parse_key_values
from .settings import Settings, settings

__all__ = [
    "RunConfig",
    "Settings",
    "dump_run_config",
    "load_run_config",
    "parse_key_values",
    "settings",
]
