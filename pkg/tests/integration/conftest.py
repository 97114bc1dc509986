"""Integration-level pytest fixtures.

These fixtures run the installed entry point in a subprocess and gate the
long error-rate trend suites behind ERRSSL_RUN_TRENDS.
"""

from __future__ import annotations

import os
import subprocess
import sys
from collections.abc import Callable
from pathlib import Path

import pytest

SRC = Path(__file__).resolve().parents[2] / "src"


@pytest.fixture
def require_trends():
    """Skip test if ERRSSL_RUN_TRENDS is not truthy (1/true/True)."""
    if os.getenv("ERRSSL_RUN_TRENDS", "0") not in ("1", "true", "True"):
        pytest.skip("trend suites disabled; set ERRSSL_RUN_TRENDS=1 to run")


@pytest.fixture
def run_errssl(tmp_path) -> Callable[..., subprocess.CompletedProcess[str]]:
    """Run `python -m errssl <args>` with JSON logs and return the completed process."""

    def _run(*args: str, timeout: float = 120.0) -> subprocess.CompletedProcess[str]:
        env = os.environ.copy()
        env["LOG_FORMAT"] = "json"
        env["LOG_LEVEL"] = "INFO"
        env["PYTHONPATH"] = os.pathsep.join(filter(None, [str(SRC), env.get("PYTHONPATH")]))
        return subprocess.run(
            [sys.executable, "-m", "errssl", *args],
            cwd=tmp_path,
            env=env,
            capture_output=True,
            text=True,
            timeout=timeout,
            check=False,
        )

    return _run
