import numpy as np
import pytest

from attnprune import AttentionMaps, Axis, SignificanceScores


def make_maps(values) -> AttentionMaps:
    return AttentionMaps.from_array(np.asarray(values, dtype=np.float32))


def fake_scores(vec) -> SignificanceScores:
    """Wrap a raw vector as SignificanceScores for selector tests."""
    arr = np.asarray(vec, dtype=np.float64)
    return SignificanceScores(
        scores=arr,
        column_means=arr,
        row_means=arr,
        column_variance=float(np.var(arr)),
        row_variance=0.0,
        chosen_axis=Axis.COLUMNS,
    )


def random_maps(rng, heads, tokens) -> AttentionMaps:
    return make_maps(rng.uniform(0.0, 1.0, size=(heads, tokens, tokens)))


@pytest.fixture
def hot_row_maps() -> AttentionMaps:
    # every query attends 0.7 to key 0 and 0.1 to the rest; two equal heads
    row = [0.7, 0.1, 0.1, 0.1]
    return make_maps([[row] * 4] * 2)


@pytest.fixture
def uniform_maps() -> AttentionMaps:
    return make_maps(np.full((1, 4, 4), 0.25))
