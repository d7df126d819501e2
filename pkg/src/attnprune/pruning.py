"""Token selection strategies and spatial reordering.

Selection works purely on index sets: callers apply the resulting
indices to whatever token payloads they carry. Three selectors exist:
global top-k by score (rank), whole grid rows by aggregate row score
(row), and a fixed 2x2-block downsample (pool4) kept as a baseline for
comparison against score-driven selection.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import GridError, ShapeError, ValueCheckError
from .significance import SignificanceScores


class Strategy(str, Enum):
    RANK = "rank"
    ROW = "row"


class SignificanceMode(str, Enum):
    """How the significance stage feeds selection.

    VARIANCE is the standard high-variance axis rule; ANTI_VARIANCE
    flips it to the low-variance axis; POOL4 bypasses scores entirely
    and keeps one representative per 2x2 grid block.
    """

    VARIANCE = "variance"
    ANTI_VARIANCE = "anti-variance"
    POOL4 = "pool4"


class SelectionMethod(str, Enum):
    RANK = "rank"
    ROW = "row"
    POOL4 = "pool4"


@dataclass(frozen=True)
class PruneConfig:
    """Retention ratio plus strategy and ablation toggles.

    ``ratio`` is a fraction in (0, 1], not a percentage. ``reorder``
    restores ascending index order after selection; disabling it keeps
    the raw selection order (score-descending for rank, row-selection
    order for row).
    """

    ratio: float
    strategy: Strategy = Strategy.RANK
    reorder: bool = True
    significance_mode: SignificanceMode = SignificanceMode.VARIANCE

    def __post_init__(self):
        if not (0.0 < self.ratio <= 1.0):
            raise ValueError(f"retention ratio must be in (0, 1], got {self.ratio}")


@dataclass(frozen=True)
class PrunedSelection:
    """Indices that survive pruning, with grid metadata.

    ``kept`` indexes into the original token sequence; it is strictly
    ascending whenever the selection was reordered. ``rows_kept`` is
    populated by the row strategy only and follows the same ordering
    discipline as ``kept``.
    """

    kept: list[int]
    n_original: int
    strategy_used: SelectionMethod
    grid_side: int | None = None
    rows_kept: list[int] | None = None


def keep_count(total: int, ratio: float) -> int:
    """Number of tokens retained from ``total`` at retention ``ratio``.

    Floor of total*ratio, but never below one token: even extreme
    ratios must leave something for downstream inference.
    """
    if total < 1:
        raise ValueError(f"total must be >= 1, got {total}")
    if not (0.0 < ratio <= 1.0):
        raise ValueError(f"retention ratio must be in (0, 1], got {ratio}")
    return min(total, max(1, math.floor(total * ratio)))


def _descending_stable(values: np.ndarray) -> np.ndarray:
    # stable sort on negated scores: ties resolve to the lower index
    return np.argsort(-values, kind="stable")


def rank_select(scores: SignificanceScores, config: PruneConfig) -> PrunedSelection:
    """Keep the globally highest-scoring tokens."""
    if config.strategy is not Strategy.RANK:
        raise ValueError("rank_select requires strategy=RANK")
    vec = np.asarray(scores.scores, dtype=np.float64)
    n = len(vec)
    order = _descending_stable(vec)[: keep_count(n, config.ratio)]
    kept = [int(i) for i in order]
    if config.reorder:
        kept = sorted(kept)
    side = math.isqrt(n)
    return PrunedSelection(
        kept=kept,
        n_original=n,
        strategy_used=SelectionMethod.RANK,
        grid_side=side if side * side == n else None,
    )


def row_select(scores: SignificanceScores, config: PruneConfig) -> PrunedSelection:
    """Keep whole grid rows ranked by aggregate row significance.

    The score vector is laid out on its n x n raster (row-major, row
    index = vertical position); rows are ranked by their summed scores
    and kept in full, preserving horizontal runs of tokens.
    """
    if config.strategy is not Strategy.ROW:
        raise ValueError("row_select requires strategy=ROW")
    vec = np.asarray(scores.scores, dtype=np.float64)
    n_tokens = len(vec)
    side = math.isqrt(n_tokens)
    if side * side != n_tokens:
        raise GridError(f"token count {n_tokens} is not a perfect square grid")
    row_sums = vec.reshape(side, side).sum(axis=1)
    rows = [int(r) for r in _descending_stable(row_sums)[: keep_count(side, config.ratio)]]
    if config.reorder:
        rows = sorted(rows)
    kept = [r * side + j for r in rows for j in range(side)]
    return PrunedSelection(
        kept=kept,
        n_original=n_tokens,
        strategy_used=SelectionMethod.ROW,
        grid_side=side,
        rows_kept=rows,
    )


def pool_select(n_tokens: int, config: PruneConfig) -> PrunedSelection:
    """Keep the top-left token of every 2x2 grid block.

    Baseline that ignores scores altogether; the grid side must be even
    so the blocks tile exactly.
    """
    if config.significance_mode is not SignificanceMode.POOL4:
        raise ValueError("pool_select requires significance_mode=POOL4")
    side = math.isqrt(n_tokens)
    if side * side != n_tokens:
        raise GridError(f"token count {n_tokens} is not a perfect square grid")
    if side % 2:
        raise GridError(f"grid side {side} does not tile into 2x2 blocks")
    kept = [i * side + j for i in range(0, side, 2) for j in range(0, side, 2)]
    return PrunedSelection(
        kept=kept,
        n_original=n_tokens,
        strategy_used=SelectionMethod.POOL4,
        grid_side=side,
    )


def reorder(indices: Sequence[int]) -> list[int]:
    """Sort selected indices ascending to restore spatial order."""
    out = [int(i) for i in indices]
    if len(set(out)) != len(out):
        raise ValueCheckError("selection indices contain duplicates")
    return sorted(out)


def apply_selection(tokens: Sequence, sel: PrunedSelection) -> list:
    """Gather token payloads at the kept indices, in kept order."""
    if len(tokens) != sel.n_original:
        raise ShapeError(
            f"got {len(tokens)} tokens but the selection was made over "
            f"{sel.n_original}"
        )
    return [tokens[i] for i in sel.kept]


def selection_document(
    sel: PrunedSelection, config: PruneConfig, scores: SignificanceScores
) -> dict:
    """JSON-ready view of a selection, fixed field names."""
    doc = {
        "n_original": sel.n_original,
        "strategy": sel.strategy_used.value,
        "ratio": config.ratio,
        "kept": list(sel.kept),
        "chosen_axis": scores.chosen_axis.value,
        "var1": scores.column_variance,
        "var2": scores.row_variance,
    }
    if sel.rows_kept is not None:
        doc["rows_kept"] = list(sel.rows_kept)
    return doc


def dumps_stable(doc: dict) -> str:
    """Serialize with sorted keys and fixed layout for byte-stable diffs."""
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
