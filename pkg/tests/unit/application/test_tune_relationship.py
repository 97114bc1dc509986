import pytest

from errssl.application.use_cases import TUNING_COLUMNS, TuneRelationship
from errssl.errors import ValidationFailedError


def _score(table, fail_on=()):
    calls = []

    def score(pair):
        calls.append(pair)
        if pair in fail_on:
            raise RuntimeError("cg diverged")
        return table[pair]

    return score, calls


def test_lowest_score_wins():
    score, calls = _score({(0.5, 10.0): 0.3, (0.5, 100.0): 0.1, (1.0, 10.0): 0.2})
    best, rows = TuneRelationship(score, 250)([(0.5, 10.0), (0.5, 100.0), (1.0, 10.0)])
    assert best == (0.5, 100.0)
    assert len(calls) == 3
    assert [row.score for row in rows] == [0.3, 0.1, 0.2]


def test_ties_keep_grid_order():
    score, _ = _score({(1.0, 1.0): 0.2, (2.0, 1.0): 0.2})
    best, _ = TuneRelationship(score, 6)([(1.0, 1.0), (2.0, 1.0)])
    assert best == (1.0, 1.0)


def test_failures_are_recorded():
    score, _ = _score({(1.0, 1.0): 0.4, (2.0, 1.0): 0.9}, fail_on={(1.0, 1.0)})
    best, rows = TuneRelationship(score, 6)([(1.0, 1.0), (2.0, 1.0)])
    assert best == (2.0, 1.0)
    assert rows[0].error == "RuntimeError: cg diverged"
    assert rows[0].as_row()[TUNING_COLUMNS.index("score")] == ""


def test_all_failures_raise():
    score, _ = _score({}, fail_on={(1.0, 1.0)})
    with pytest.raises(ValidationFailedError, match="all 1 relationship pairs failed"):
        TuneRelationship(score, 6)([(1.0, 1.0)])


def test_empty_grid():
    with pytest.raises(ValueError):
        TuneRelationship(lambda pair: 0.0, 6)([])


def test_row_layout_with_adaptive_bandwidth():
    best, rows = TuneRelationship(lambda pair: 0.25, 40)([(None, 50.0)])
    assert best == (None, 50.0)
    assert rows[0].as_row() == [40, "", 50.0, 0.25, ""]
    assert len(TUNING_COLUMNS) == len(rows[0].as_row())
