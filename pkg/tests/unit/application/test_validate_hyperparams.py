import numpy as np
import pytest

from errssl.application.use_cases import (
    VALIDATION_COLUMNS,
    ValidateHyperparams,
    staged_search,
    validate_hyperparams,
)
from errssl.domain.dataset import SupervisionSplit
from errssl.domain.ports.pipeline import PipelinePort
from errssl.errors import ValidationFailedError
from errssl.models import EnergyConfig, GraphConfig

TRUTH = np.array([0, 1, 0, 1, 0, 1, 0, 1, 0, 1])


@pytest.fixture
def split():
    return SupervisionSplit(
        u=10,
        n_classes=2,
        labeled=[0, 1],
        labeled_targets=[0, 1],
        validation=[2, 3, 4, 5],
        validation_targets=[0, 1, 0, 1],
        unlabeled=[6, 7, 8, 9],
    )


class FakePipeline:
    """Flips the first `wrong` predictions, where `wrong` is read from lambda2."""

    def __init__(self, fail_on=(), extra_wrong=0):
        self.calls = []
        self.fail_on = set(fail_on)
        self.extra_wrong = extra_wrong

    def __call__(self, config, split):
        self.calls.append(config)
        if config.lambda2 in self.fail_on:
            raise RuntimeError("solver exploded")
        pred = TRUTH.copy()
        wrong = int(config.lambda2) + self.extra_wrong
        pred[2 : 2 + wrong] = 1 - pred[2 : 2 + wrong]
        return pred


def test_fake_satisfies_port():
    assert isinstance(FakePipeline(), PipelinePort)


def test_single_config_is_returned(split):
    config = EnergyConfig(lambda2=0.0)
    best, rows = validate_hyperparams([config], split, FakePipeline(), TRUTH)
    assert best == config
    assert len(rows) == 1
    assert rows[0].validation_error == 0.0
    assert rows[0].evaluation_error == 0.0


def test_lowest_validation_error_wins(split):
    grid = [EnergyConfig(lambda2=v) for v in (3.0, 1.0, 2.0)]
    best, rows = validate_hyperparams(grid, split, FakePipeline(), TRUTH)
    assert best.lambda2 == 1.0
    assert [row.validation_error for row in rows] == [0.75, 0.25, 0.5]


def test_ties_keep_grid_order(split):
    grid = [EnergyConfig(lambda1=0.5, lambda2=1.0), EnergyConfig(lambda1=2.0, lambda2=1.0)]
    best, _ = validate_hyperparams(grid, split, FakePipeline(), TRUTH)
    assert best.lambda1 == 0.5


def test_failures_are_recorded(split):
    grid = [EnergyConfig(lambda2=0.0), EnergyConfig(lambda2=2.0)]
    best, rows = validate_hyperparams(grid, split, FakePipeline(fail_on={0.0}), TRUTH)
    assert best.lambda2 == 2.0
    assert not rows[0].ok
    assert rows[0].error == "RuntimeError: solver exploded"
    assert rows[0].as_row()[VALIDATION_COLUMNS.index("validation_error")] == ""


def test_all_failures_raise(split):
    grid = [EnergyConfig(lambda2=0.0), EnergyConfig(lambda2=1.0)]
    with pytest.raises(ValidationFailedError, match="all 2 configurations failed"):
        validate_hyperparams(grid, split, FakePipeline(fail_on={0.0, 1.0}), TRUTH)


def test_empty_grid(split):
    with pytest.raises(ValueError):
        ValidateHyperparams(FakePipeline(), TRUTH)([], split)


def test_row_layout(split):
    _, rows = validate_hyperparams([EnergyConfig(sparsity=4)], split, FakePipeline(), TRUTH)
    row = rows[0].as_row()
    assert len(row) == len(VALIDATION_COLUMNS)
    assert row[VALIDATION_COLUMNS.index("sparsity")] == 4
    assert row[VALIDATION_COLUMNS.index("stage")] == "grid"
    assert row[VALIDATION_COLUMNS.index("k_n")] == ""


def test_no_wall_clock_column(split):
    _, rows = validate_hyperparams([EnergyConfig()], split, FakePipeline(), TRUTH)
    assert "runtime_s" not in VALIDATION_COLUMNS
    assert rows[0].runtime_s >= 0.0
    again = validate_hyperparams([EnergyConfig()], split, FakePipeline(), TRUTH)[1]
    assert rows[0].as_row() == again[0].as_row()


class TestStagedSearch:
    def test_evaluates_sum_of_grid_sizes(self, split):
        pipeline = FakePipeline()
        irr_grid = [EnergyConfig(lambda1=v, lambda2=3.0) for v in (0.1, 1.0, 10.0)]
        err_grid = [(0.5, 1.0), (1.0, 2.0)]
        result = staged_search(irr_grid, err_grid, split, pipeline, TRUTH)
        assert len(pipeline.calls) == 5
        assert len(result.rows) == 5
        assert [row.stage for row in result.rows] == ["irr"] * 3 + ["err"] * 2

    def test_irr_stage_forces_no_relationship_term(self, split):
        pipeline = FakePipeline()
        result = staged_search(
            [EnergyConfig(lambda1=0.3, lambda2=3.0)], [(0.5, 1.0)], split, pipeline, TRUTH
        )
        assert pipeline.calls[0].lambda2 == 0.0
        assert result.best_irr.lambda1 == 0.3
        assert result.best_err.lambda1 == 0.3
        assert result.best_err.sigma_f_sq == 0.5
        assert result.best_err.lambda2 == 1.0

    def test_without_err_grid(self, split):
        result = staged_search([EnergyConfig()], [], split, FakePipeline(), TRUTH)
        assert result.best_err == result.best_irr

    def test_empty_irr_grid(self, split):
        with pytest.raises(ValueError):
            staged_search([], [(0.5, 1.0)], split, FakePipeline(), TRUTH)


class DisagreeingPipeline:
    """lambda2 = 1 misses one validation point, lambda2 = 2 misses two unlabeled points."""

    def __call__(self, config, split):
        pred = TRUTH.copy()
        if config.lambda2 == 1.0:
            pred[2] = 1 - pred[2]
        if config.lambda2 == 2.0:
            pred[6:8] = 1 - pred[6:8]
        return pred


class TestGraphCandidates:
    @pytest.fixture
    def graphs(self):
        return [
            (GraphConfig(k_n=5), FakePipeline(extra_wrong=2)),
            (GraphConfig(k_n=10, sigma_x_sq=0.5), FakePipeline()),
            (GraphConfig(k_n=15), FakePipeline(extra_wrong=1)),
        ]

    def test_crossed_with_irr_grid(self, split, graphs):
        irr_grid = [EnergyConfig(lambda1=v) for v in (0.1, 1.0)]
        result = staged_search(irr_grid, [(0.5, 1.0)], split, FakePipeline(), TRUTH, graphs)
        assert len(result.rows) == 3 * 2 + 1
        assert [row.graph.k_n for row in result.rows[:6]] == [5, 5, 10, 10, 15, 15]
        assert all(len(pipeline.calls) == 2 for _, pipeline in (graphs[0], graphs[2]))

    def test_chosen_neighbourhood_comes_from_grid(self, split, graphs):
        result = staged_search([EnergyConfig()], [(0.5, 1.0)], split, FakePipeline(), TRUTH, graphs)
        assert result.best_graph.k_n in {5, 10, 15}
        assert result.best_graph == GraphConfig(k_n=10, sigma_x_sq=0.5)

    def test_err_stage_runs_on_winning_graph(self, split, graphs):
        own = FakePipeline()
        result = staged_search(
            [EnergyConfig()], [(0.5, 1.0), (1.0, 2.0)], split, own, TRUTH, graphs
        )
        assert own.calls == []
        assert len(graphs[1][1].calls) == 3
        assert len(graphs[0][1].calls) == len(graphs[2][1].calls) == 1
        err_rows = [row for row in result.rows if row.stage == "err"]
        assert all(row.graph.k_n == 10 for row in err_rows)
        cells = err_rows[0].as_row()
        assert cells[VALIDATION_COLUMNS.index("k_n")] == 10
        assert cells[VALIDATION_COLUMNS.index("sigma_x_sq")] == 0.5


class TestBestCase:
    def test_best_case_never_above_validated_choice(self, split):
        result = ValidateHyperparams(DisagreeingPipeline(), TRUTH).staged(
            [EnergyConfig()], [(1.0, 1.0), (1.0, 2.0)], split
        )
        chosen = next(
            row for row in result.rows if row.stage == "err" and row.config == result.best_err
        )
        assert result.best_err.lambda2 == 2.0
        assert chosen.evaluation_error == 0.5
        assert result.best_case("err") == 0.0
        assert result.best_case("err") <= chosen.evaluation_error
        assert result.best_case("irr") == 0.0

    def test_failed_rows_are_ignored(self, split):
        result = staged_search(
            [EnergyConfig()], [(1.0, 1.0), (1.0, 6.0)], split, FakePipeline(fail_on={1.0}), TRUTH
        )
        assert result.best_case("irr") == 0.0
        assert result.best_case("err") == 0.5

    def test_stage_without_rows(self, split):
        result = staged_search([EnergyConfig()], [], split, FakePipeline(), TRUTH)
        with pytest.raises(ValueError, match="no successful 'err' rows"):
            result.best_case("err")
