from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
import structlog

from ...errors import ValidationFailedError

logger = structlog.get_logger(__name__)

TUNING_COLUMNS = ("s_r", "sigma_f_sq", "lambda2_prime", "score", "error")

# (sigma_f^2, lambda2'); None keeps the adaptive bandwidth / the raw lambda2
RelationshipPair = tuple[float | None, float | None]


@dataclass(frozen=True)
class TuningRow:
    s_r: int
    pair: RelationshipPair
    score: float | None
    error: str | None = None

    def as_row(self) -> list[Any]:
        sigma_f_sq, lambda2_prime = self.pair
        return [
            self.s_r,
            "" if sigma_f_sq is None else sigma_f_sq,
            "" if lambda2_prime is None else lambda2_prime,
            "" if self.score is None else self.score,
            self.error or "",
        ]


class TuneRelationship:
    """Score (sigma_f^2, lambda2') pairs once at a reference s_R and keep the lowest score.

    The caller supplies the score: NCut of the clustering for `cluster`,
    leave-one-out 1-NN error for `embed`. Ties keep the earliest pair and a
    failing pair is recorded and skipped.
    """

    def __init__(self, score: Callable[[RelationshipPair], float], s_r: int) -> None:
        self._score = score
        self._s_r = s_r

    def _evaluate(self, pair: RelationshipPair) -> TuningRow:
        try:
            score = float(self._score(pair))
        except Exception as e:
            logger.warning("tuning.pair_failed", pair=pair, error=str(e))
            return TuningRow(s_r=self._s_r, pair=pair, score=None, error=f"{type(e).__name__}: {e}")
        logger.debug("tuning.pair_done", pair=pair, score=score)
        return TuningRow(s_r=self._s_r, pair=pair, score=score)

    def __call__(
        self, pairs: Sequence[RelationshipPair]
    ) -> tuple[RelationshipPair, list[TuningRow]]:
        if not pairs:
            raise ValueError("relationship tuning grid is empty")
        rows = [self._evaluate(pair) for pair in pairs]
        best: TuningRow | None = None
        best_score = np.inf
        for row in rows:
            if row.score is not None and row.score < best_score:
                best, best_score = row, row.score
        if best is None:
            raise ValidationFailedError(
                f"all {len(rows)} relationship pairs failed; first error: {rows[0].error}"
            )
        logger.info(
            "tuning.selected",
            s_r=self._s_r,
            sigma_f_sq=best.pair[0],
            lambda2_prime=best.pair[1],
            score=best.score,
            evaluated=len(rows),
        )
        return best.pair, rows
