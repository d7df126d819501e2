import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attnprune import estimate, keep_count
from attnprune.cost_model import MODEL_LABEL, MODEL_NOTE


def test_no_pruning_is_identity():
    est = estimate(576, 64, 1.0)
    assert est.tokens_before == est.tokens_after == 640
    assert est.prefill_ratio == est.decode_ratio == 1.0
    assert est.prefill_speedup == est.decode_speedup == 1.0


def test_quarter_retention_on_llava_counts():
    est = estimate(576, 64, 0.25)
    assert est.tokens_after == 208
    assert est.prefill_speedup == pytest.approx((640 / 208) ** 2)
    assert est.decode_speedup == pytest.approx(640 / 208)


def test_speedups_strictly_decrease_with_retention():
    speedups = [estimate(576, 64, r) for r in (0.25, 0.5, 0.75)]
    prefills = [e.prefill_speedup for e in speedups]
    decodes = [e.decode_speedup for e in speedups]
    assert prefills == sorted(prefills, reverse=True) and len(set(prefills)) == 3
    assert decodes == sorted(decodes, reverse=True) and len(set(decodes)) == 3


def test_rejects_bad_counts():
    with pytest.raises(ValueError):
        estimate(0, 10, 0.5)
    with pytest.raises(ValueError):
        estimate(10, -1, 0.5)


@settings(deadline=None, max_examples=60)
@given(
    visual=st.integers(1, 2000),
    textual=st.integers(0, 2000),
    ratio=st.floats(0.001, 1.0),
)
def test_ratios_consistent_and_bounded(visual, textual, ratio):
    est = estimate(visual, textual, ratio)
    assert est.tokens_after == keep_count(visual, ratio) + textual
    assert 0.0 < est.prefill_ratio <= 1.0
    assert 0.0 < est.decode_ratio <= 1.0
    assert est.prefill_speedup >= est.decode_speedup >= 1.0
    assert est.prefill_ratio == pytest.approx(est.decode_ratio**2)


def test_document_carries_upper_bound_label():
    doc = estimate(100, 10, 0.5).to_document()
    assert doc["model"] == MODEL_LABEL == "quadratic-upper-bound"
    assert "upper bound" in doc["note"] and doc["note"] == MODEL_NOTE
    assert set(doc) == {
        "tokens_before",
        "tokens_after",
        "prefill_speedup",
        "decode_speedup",
        "model",
        "note",
    }
