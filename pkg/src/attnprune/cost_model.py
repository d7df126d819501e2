"""Analytical work savings from pruning the visual token stream.

Attention-dominated prefill scales with the square of the input length
and per-step decode scales linearly, so the model is:

    prefill_ratio = (tokens_after / tokens_before)^2
    decode_ratio  =  tokens_after / tokens_before

These are UPPER BOUNDS on achievable speedup. Real pipelines spend
time in projection, sampling, and memory-bound decode that pruning
does not touch, so measured wall-clock gains come in well below the
bound; only the monotone trend (smaller retention, larger speedup) is
claimed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .pruning import keep_count

MODEL_LABEL = "quadratic-upper-bound"
MODEL_NOTE = (
    "analytical upper bound; measured end-to-end speedups are typically much smaller"
)


@dataclass(frozen=True)
class CostEstimate:
    tokens_before: int
    tokens_after: int
    prefill_ratio: float
    decode_ratio: float
    prefill_speedup: float
    decode_speedup: float

    def to_document(self) -> dict:
        return {
            "tokens_before": self.tokens_before,
            "tokens_after": self.tokens_after,
            "prefill_speedup": self.prefill_speedup,
            "decode_speedup": self.decode_speedup,
            "model": MODEL_LABEL,
            "note": MODEL_NOTE,
        }


def estimate(visual: int, textual: int, ratio: float) -> CostEstimate:
    """Work ratios when ``visual`` tokens are pruned at ``ratio``.

    Token counts are integers shared with the pruner (same floor/min-1
    rounding), so the estimate matches what a real selection would keep.
    """
    if visual < 1:
        raise ValueError(f"visual token count must be >= 1, got {visual}")
    if textual < 0:
        raise ValueError(f"textual token count must be >= 0, got {textual}")
    before = visual + textual
    after = keep_count(visual, ratio) + textual
    decode_ratio = after / before
    return CostEstimate(
        tokens_before=before,
        tokens_after=after,
        prefill_ratio=decode_ratio**2,
        decode_ratio=decode_ratio,
        prefill_speedup=1.0 / decode_ratio**2,
        decode_speedup=1.0 / decode_ratio,
    )
