"""Diagnostics for attention concentration and token budgets.

Deep encoder layers tend to pile most of their attention mass onto a
small token subset; ``concentration`` measures that directly (smallest
token fraction holding a given mass share) alongside a Gini
coefficient. ``layer_sweep`` runs the measurement over a series of
per-layer dumps so shallow and deep layers can be compared in one
table. ``token_budget`` reports how visual tokens dominate a combined
visual+textual input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import significance, tensor_io
from .errors import AttnpruneError, DegenerateInputError, ValueCheckError


@dataclass(frozen=True)
class ConcentrationReport:
    """How concentrated a non-negative score vector is.

    ``token_fraction`` is k/N for the minimal k such that the k largest
    scores hold at least ``mass_threshold`` of the total mass. ``gini``
    is the standard mean-absolute-difference Gini coefficient (0 for
    uniform scores, approaching (N-1)/N when one token takes all mass).
    """

    mass_threshold: float
    token_fraction: float
    gini: float

    def to_document(self) -> dict:
        return {
            "mass_threshold": self.mass_threshold,
            "token_fraction": self.token_fraction,
            "gini": self.gini,
        }


@dataclass(frozen=True)
class TokenBudgetReport:
    visual_tokens: int
    textual_tokens: int
    visual_fraction: float

    def to_document(self) -> dict:
        return {
            "visual_tokens": self.visual_tokens,
            "textual_tokens": self.textual_tokens,
            "visual_fraction": self.visual_fraction,
        }


@dataclass(frozen=True)
class SweepEntry:
    """One file's result in a layer sweep; ``error`` set on failure."""

    path: str
    report: ConcentrationReport | None = None
    error: str | None = None


def gini(values) -> float:
    """Gini coefficient of non-negative values with positive total."""
    xs = np.sort(np.asarray(values, dtype=np.float64))
    n = len(xs)
    total = float(xs.sum())
    if n == 0 or total <= 0:
        raise DegenerateInputError("Gini needs a positive total")
    ranks = np.arange(1, n + 1, dtype=np.float64)
    g = float((2.0 * np.dot(ranks, xs) - (n + 1) * total) / (n * total))
    return max(g, 0.0)


def concentration(scores, mass_threshold: float) -> ConcentrationReport:
    """Concentration report for a non-negative score vector."""
    vec = np.asarray(scores, dtype=np.float64).ravel()
    n = len(vec)
    if n < 1:
        raise DegenerateInputError("score vector is empty")
    if not (0.0 < mass_threshold <= 1.0):
        raise ValueError(f"mass_threshold must be in (0, 1], got {mass_threshold}")
    if np.any(vec < 0) or not np.all(np.isfinite(vec)):
        idx = int(np.argmax(~(np.isfinite(vec) & (vec >= 0))))
        raise ValueCheckError(f"score at index {idx} is invalid: {vec[idx]!r}")
    total = float(vec.sum())
    if total <= 0.0:
        raise DegenerateInputError("all scores are zero; concentration is undefined")
    prefix = np.cumsum(np.sort(vec)[::-1])
    # tiny relative slack so exact-tie prefixes are not lost to roundoff
    target = mass_threshold * total - 1e-9 * total
    k = min(int(np.searchsorted(prefix, target, side="left")) + 1, n)
    return ConcentrationReport(
        mass_threshold=mass_threshold,
        token_fraction=k / n,
        gini=gini(vec),
    )


def token_budget(visual: int, textual: int) -> TokenBudgetReport:
    if visual < 0 or textual < 0:
        raise ValueError("token counts must be non-negative")
    if visual + textual < 1:
        raise DegenerateInputError("no tokens at all; budget is undefined")
    return TokenBudgetReport(
        visual_tokens=visual,
        textual_tokens=textual,
        visual_fraction=visual / (visual + textual),
    )


def layer_sweep(
    paths, mass_threshold: float, *, cls_token: str = "none"
) -> list[SweepEntry]:
    """Concentration per attention dump, in input order.

    Failures on individual files are recorded in the entry and do not
    abort the sweep.
    """
    entries: list[SweepEntry] = []
    for path in paths:
        try:
            maps = tensor_io.load_attention(path, cls_token=cls_token)
            scores = significance.compute_significance(maps)
            entries.append(
                SweepEntry(path=str(path), report=concentration(scores.scores, mass_threshold))
            )
        except (AttnpruneError, OSError) as exc:
            entries.append(SweepEntry(path=str(path), error=str(exc)))
    return entries


def format_table(headers, rows) -> str:
    """Aligned plain-text table; first column left, the rest right."""
    cells = [[str(h) for h in headers]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = []
    for r in cells:
        first = r[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        lines.append("  ".join([first, *rest]).rstrip())
    return "\n".join(lines)
