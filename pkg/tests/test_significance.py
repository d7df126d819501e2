import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attnprune import (
    Axis,
    average_heads,
    axis_means,
    compute_significance,
    compute_significance_ablated,
)
from conftest import make_maps, random_maps
from naive import naive_significance


class TestAverageHeads:
    def test_single_head_is_identity(self):
        data = np.random.default_rng(0).uniform(size=(1, 5, 5)).astype(np.float32)
        out = average_heads(make_maps(data))
        np.testing.assert_allclose(out, data[0], rtol=1e-7)

    def test_two_head_mean(self):
        maps = make_maps(np.stack([np.zeros((3, 3)), np.ones((3, 3))]))
        np.testing.assert_array_equal(average_heads(maps), np.full((3, 3), 0.5))

    def test_matches_triple_loop(self):
        rng = np.random.default_rng(7)
        data = rng.uniform(size=(3, 2, 2)).astype(np.float32)
        expected = naive_significance(data.tolist())["avg"]
        np.testing.assert_allclose(average_heads(make_maps(data)), expected, rtol=1e-6)


class TestAxisMeans:
    def test_uniform(self):
        cols, rows = axis_means(np.full((4, 4), 0.25))
        np.testing.assert_array_equal(cols, [0.25] * 4)
        np.testing.assert_array_equal(rows, [0.25] * 4)

    def test_repeated_row(self):
        avg = np.tile([0.7, 0.1, 0.1, 0.1], (4, 1))
        cols, rows = axis_means(avg)
        np.testing.assert_allclose(cols, [0.7, 0.1, 0.1, 0.1], rtol=1e-12)
        np.testing.assert_allclose(rows, [0.25] * 4, rtol=1e-12)

    def test_identity_matrix(self):
        cols, rows = axis_means(np.eye(3))
        np.testing.assert_allclose(cols, [1 / 3] * 3)
        np.testing.assert_allclose(rows, [1 / 3] * 3)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            axis_means(np.zeros((2, 3)))


class TestVarianceGate:
    def test_hot_row_prefers_columns(self, hot_row_maps):
        sig = compute_significance(hot_row_maps)
        assert sig.chosen_axis is Axis.COLUMNS
        assert sig.column_variance == pytest.approx(0.0675, rel=1e-6)
        assert sig.row_variance == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(sig.scores, [0.7, 0.1, 0.1, 0.1], rtol=1e-6)

    def test_uniform_tie_falls_to_rows(self, uniform_maps):
        sig = compute_significance(uniform_maps)
        assert sig.column_variance == sig.row_variance == 0.0
        assert sig.chosen_axis is Axis.ROWS
        np.testing.assert_array_equal(sig.scores, sig.row_means)

    def test_scores_alias_winning_axis(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            sig = compute_significance(random_maps(rng, 2, 6))
            expected = sig.column_means if sig.chosen_axis is Axis.COLUMNS else sig.row_means
            assert sig.scores is expected


class TestAblatedGate:
    def test_hot_row_prefers_rows(self, hot_row_maps):
        sig = compute_significance_ablated(hot_row_maps)
        assert sig.chosen_axis is Axis.ROWS
        np.testing.assert_allclose(sig.scores, [0.25] * 4, rtol=1e-6)

    def test_uniform_tie_falls_to_columns(self, uniform_maps):
        assert compute_significance_ablated(uniform_maps).chosen_axis is Axis.COLUMNS

    def test_opposite_of_main_when_variances_differ(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            maps = random_maps(rng, 2, 5)
            main = compute_significance(maps)
            if main.column_variance == main.row_variance:
                continue
            assert compute_significance_ablated(maps).chosen_axis is not main.chosen_axis


def test_transpose_swaps_axes():
    rng = np.random.default_rng(42)
    for _ in range(50):
        mat = rng.uniform(size=(6, 6)).astype(np.float32)
        fwd = compute_significance(make_maps(mat[None]))
        bwd = compute_significance(make_maps(mat.T[None]))
        if abs(fwd.column_variance - fwd.row_variance) < 1e-12:
            continue
        assert {fwd.chosen_axis, bwd.chosen_axis} == {Axis.COLUMNS, Axis.ROWS}
        np.testing.assert_allclose(fwd.scores, bwd.scores, rtol=1e-9)


@settings(deadline=None, max_examples=40)
@given(
    seed=st.integers(0, 2**32 - 1),
    scale=st.floats(0.01, 100.0),
    heads=st.integers(1, 3),
    tokens=st.integers(2, 8),
)
def test_scale_covariance(seed, scale, heads, tokens):
    rng = np.random.default_rng(seed)
    base = rng.uniform(0.1, 1.0, size=(heads, tokens, tokens))
    a = compute_significance(make_maps(base))
    b = compute_significance(make_maps(base * scale))
    # float32 storage quantizes the scaled tensor, so compare loosely and
    # only trust the axis when the variance gap dwarfs that noise
    np.testing.assert_allclose(b.scores, np.asarray(a.scores) * scale, rtol=1e-4)
    gap = abs(a.column_variance - a.row_variance)
    if gap > 1e-5 * max(a.column_variance, a.row_variance):
        assert b.chosen_axis is a.chosen_axis


@settings(deadline=None, max_examples=40)
@given(seed=st.integers(0, 2**32 - 1), tokens=st.integers(2, 10))
def test_permutation_covariance(seed, tokens):
    rng = np.random.default_rng(seed)
    data = rng.uniform(size=(2, tokens, tokens)).astype(np.float32)
    perm = rng.permutation(tokens)
    permuted = data[:, perm][:, :, perm]
    a = compute_significance(make_maps(data))
    b = compute_significance(make_maps(permuted))
    np.testing.assert_allclose(np.asarray(a.column_means)[perm], b.column_means, rtol=1e-9)
    np.testing.assert_allclose(np.asarray(a.row_means)[perm], b.row_means, rtol=1e-9)
    assert b.column_variance == pytest.approx(a.column_variance, rel=1e-9)
    assert b.row_variance == pytest.approx(a.row_variance, rel=1e-9)


def test_row_stochastic_row_means_average_to_inverse_n():
    rng = np.random.default_rng(5)
    for tokens in (3, 8, 16):
        raw = rng.uniform(0.1, 1.0, size=(2, tokens, tokens))
        maps = make_maps(raw / raw.sum(axis=2, keepdims=True))
        sig = compute_significance(maps)
        assert float(np.mean(sig.row_means)) == pytest.approx(1.0 / tokens, rel=1e-6)


def test_matches_naive_oracle_spot_checks():
    rng = np.random.default_rng(99)
    for _ in range(20):
        heads = int(rng.integers(1, 5))
        tokens = int(rng.integers(1, 17))
        maps = random_maps(rng, heads, tokens)
        ours = compute_significance(maps)
        ref = naive_significance(maps.data.tolist())
        np.testing.assert_allclose(ours.column_means, ref["col_means"], rtol=1e-6)
        np.testing.assert_allclose(ours.row_means, ref["row_means"], rtol=1e-6)
        assert ours.column_variance == pytest.approx(ref["var1"], rel=1e-6, abs=1e-12)
        assert ours.row_variance == pytest.approx(ref["var2"], rel=1e-6, abs=1e-12)
        assert ours.chosen_axis.value == ref["chosen"]
