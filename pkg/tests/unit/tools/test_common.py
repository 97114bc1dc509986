import math

import numpy as np
import pytest

from errssl.config.run_config import RunConfig
from errssl.domain.dataset import DataSet
from errssl.errors import ConfigError
from errssl.models import CommandResult
from errssl.tools import common
from errssl.tools.bench import loglog_slope
from errssl.tools.common import (
    check_sparsity,
    effective_lambda2,
    execute,
    format_table,
    graph_grid,
    mean_std,
    relation_labels,
    relation_sweep,
    tuning_pairs,
    with_pair,
)


class TestEffectiveLambda2:
    def test_prime_divided_by_label_count(self):
        config = RunConfig(command="cluster", lambda2_prime=6.0)
        assert effective_lambda2(config, 6) == 1.0

    def test_raw_lambda2_without_prime(self):
        config = RunConfig(command="cluster", lambda2=2.5)
        assert effective_lambda2(config, 40) == 2.5

    def test_no_labels_means_no_relationship_term(self):
        config = RunConfig(command="cluster", lambda2=2.5, lambda2_prime=6.0)
        assert effective_lambda2(config, 0) == 0.0


def test_relation_sweep_defaults():
    assert relation_sweep(RunConfig(command="cluster")) == [0]
    assert relation_sweep(RunConfig(command="cluster", sr=20)) == [20]
    assert relation_sweep(RunConfig(command="cluster", sr=20, sr_sweep="0,50")) == [0, 50]


def test_sparsity_requires_first_power():
    check_sparsity(RunConfig(command="classify", nk=5))
    with pytest.raises(ConfigError, match="denser matrix"):
        check_sparsity(RunConfig(command="classify", nk=5, p=2))


def test_mean_std():
    assert mean_std([1.0, 3.0]) == (2.0, pytest.approx(math.sqrt(2.0)))
    assert mean_std([0.5]) == (0.5, 0.0)
    mean, std = mean_std([])
    assert math.isnan(mean) and math.isnan(std)


def test_format_table_aligns_columns():
    lines = format_table(["method", "error"], [["IRR", 0.25], ["ERR", None]])
    assert lines[0] == "method  error "
    assert lines[2] == "IRR     0.2500"
    assert lines[3] == "ERR     -     "


def test_loglog_slope_of_cubic():
    sizes = [100, 200, 400]
    assert loglog_slope(sizes, [1e-6 * u**3 for u in sizes]) == pytest.approx(3.0)


class TestExecute:
    def test_writes_effective_config(self, tmp_path):
        config = RunConfig(command="classify", out=str(tmp_path))
        result = execute("classify", config, lambda c, sink: CommandResult(success=True))
        assert result.success
        assert "command = classify" in (tmp_path / "effective_config.txt").read_text()

    def test_exceptions_become_failed_results(self, tmp_path):
        def body(config, sink):
            raise ConfigError("bad knn")

        result = execute("classify", RunConfig(command="classify", out=str(tmp_path)), body)
        assert not result.success
        assert result.error == "ConfigError: bad knn"


class _LogCapture:
    def __init__(self):
        self.warnings = []

    def warning(self, event, **kwargs):
        self.warnings.append((event, kwargs))


class TestRelationLabelFile:
    @pytest.fixture
    def tiny(self):
        return DataSet(points=np.arange(6.0).reshape(3, 2), labels=np.array([0, 1, 1]), name="tiny")

    def _load(self, tmp_path, monkeypatch, ds, text):
        path = tmp_path / "relations.csv"
        path.write_text(text)
        log = _LogCapture()
        monkeypatch.setattr(common, "logger", log)
        config = RunConfig(command="cluster", relations=str(path))
        return relation_labels(ds, config, 0, seed=0), log, path

    def test_contradicting_pairs_are_logged(self, tmp_path, monkeypatch, tiny):
        labels, log, path = self._load(tmp_path, monkeypatch, tiny, "0,1,must\n")
        assert labels.s_r == 1
        assert log.warnings == [
            ("relations.contradict_ground_truth", {"path": str(path), "s_r": 1})
        ]

    def test_consistent_pairs_are_quiet(self, tmp_path, monkeypatch, tiny):
        labels, log, _ = self._load(tmp_path, monkeypatch, tiny, "1,2,must\n0,2,cannot\n")
        assert labels.s_r == 2
        assert log.warnings == []


class TestGraphGrid:
    def test_empty_without_grid(self):
        assert graph_grid(RunConfig(command="classify")) == []

    def test_crosses_knn_and_bandwidth(self):
        config = RunConfig(command="classify", grid_knn="5,10", grid_sigma_x="0.5,2", p=2)
        grid = graph_grid(config)
        assert [(gc.k_n, gc.sigma_x_sq) for gc in grid] == [(5, 0.5), (5, 2.0), (10, 0.5), (10, 2.0)]
        assert all(gc.p == 2 for gc in grid)

    def test_knn_only_keeps_run_bandwidth(self):
        grid = graph_grid(RunConfig(command="classify", grid_knn="5,10", sigma_x=0.3))
        assert [(gc.k_n, gc.sigma_x_sq) for gc in grid] == [(5, 0.3), (10, 0.3)]


class TestTuningPairs:
    def test_empty_without_grid(self):
        assert tuning_pairs(RunConfig(command="cluster", lambda2_prime=5.0)) == []

    def test_missing_axis_uses_run_value(self):
        config = RunConfig(command="cluster", grid_lambda2_prime="10,100")
        assert tuning_pairs(config) == [(None, 10.0), (None, 100.0)]

    def test_pair_applied_to_config(self):
        config = with_pair(RunConfig(command="embed"), (0.5, 40.0))
        assert (config.sigma_f, config.lambda2_prime) == (0.5, 40.0)
        assert effective_lambda2(config, 8) == 5.0
