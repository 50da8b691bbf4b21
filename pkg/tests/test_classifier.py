import numpy as np
import pytest

import oracles
from dynbgs.background_model import BackgroundModel, init_model
from dynbgs.classifier import (
    ThresholdParams,
    classify,
    classify_with_distance,
    l1_color,
    thresholds_at,
)
from dynbgs.feedback import min_distance
from dynbgs.lbsp import compute_lbsp, pack_codes
from dynbgs.rng import CounterRng


def random_instance(rs, h=8, w=8, c=3, n=50):
    """Random model whose per-pixel spread puts match counts around the boundary."""
    frame = rs.integers(0, 256, (h, w, c), dtype=np.uint8)
    lbsp = compute_lbsp(frame)
    spread = rs.integers(20, 1500, (h, w, 1, 1))
    jitter = (rs.uniform(-1, 1, (h, w, n, c)) * spread).astype(int)
    colors = np.clip(frame[:, :, None, :].astype(int) + jitter, 0, 255).astype(np.uint8)
    keep = rs.random((h, w, n, c, 16)) < rs.uniform(0.0, 0.5, (h, w, 1, 1, 1))
    flips = (keep * (1 << np.arange(16))).sum(axis=-1)
    codes = (lbsp[:, :, None, :].astype(np.int64) ^ flips).astype(np.uint16)
    model = BackgroundModel(colors=np.ascontiguousarray(colors.transpose(0, 1, 3, 2)),
                            packed=pack_codes(codes))
    r_map = rs.uniform(1.0, 4.0, (h, w))
    return frame, lbsp, model, codes, r_map


def sample_colors(model):
    return model.colors.transpose(0, 1, 3, 2)


def test_l1_examples(rs):
    assert l1_color([5, 5, 5], [5, 5, 5]) == 0
    assert l1_color([10, 20, 30], [30, 20, 10]) == 40
    a = rs.integers(0, 256, (100, 3))
    b = rs.integers(0, 256, (100, 3))
    for x, y, d in zip(a, b, l1_color(a, b)):
        assert d == oracles.l1(x, y)


def test_thresholds_examples():
    assert thresholds_at(1) == (30, 5)
    assert thresholds_at(2) == (60, 7)
    assert thresholds_at(3, ThresholdParams(r0_color=18, r0_lbsp=3)) == (54, 11)


def test_identical_frame_is_background(rs):
    frame = rs.integers(0, 256, (8, 8, 3), dtype=np.uint8)
    lbsp = compute_lbsp(frame)
    model = init_model(frame, lbsp, CounterRng(0))
    model.colors[:] = frame[:, :, :, None]
    model.packed[:] = pack_codes(lbsp)[:, :, None]
    assert (classify(frame, lbsp, model, np.ones((8, 8))) == 0).all()


def test_inverted_frame_is_foreground():
    frame = np.zeros((6, 6, 3), np.uint8)
    model = init_model(frame, compute_lbsp(frame), CounterRng(0))
    inv = 255 - frame
    assert (classify(inv, compute_lbsp(inv), model, np.ones((6, 6))) == 255).all()


@pytest.mark.parametrize("k,label", [(0, 255), (1, 255), (2, 0), (3, 0)])
def test_min_matches_boundary(k, label):
    frame = np.full((5, 5, 3), 100, np.uint8)
    lbsp = compute_lbsp(frame)
    model = init_model(np.full((5, 5, 3), 250, np.uint8), lbsp, CounterRng(0))
    model.colors[2, 2, :, :k] = 100
    mask = classify(frame, lbsp, model, np.ones((5, 5)))
    assert mask[2, 2] == label


def test_thresholds_are_strict():
    # L1 of exactly C * 30 * R must not match
    frame = np.full((5, 5, 1), 100, np.uint8)
    lbsp = compute_lbsp(frame)
    model = init_model(frame, lbsp, CounterRng(0))
    model.colors[2, 2, :] = 130
    assert classify(frame, lbsp, model, np.ones((5, 5)))[2, 2] == 255
    model.colors[2, 2, :] = 129
    assert classify(frame, lbsp, model, np.ones((5, 5)))[2, 2] == 0


def test_matches_brute_force_oracle(rs):
    for _ in range(25):
        frame, lbsp, model, codes, r_map = random_instance(rs)
        expected = oracles.classify(frame, lbsp, sample_colors(model), codes, r_map)
        np.testing.assert_array_equal(classify(frame, lbsp, model, r_map), expected)


def test_single_channel_oracle(rs):
    frame, lbsp, model, codes, r_map = random_instance(rs, c=1)
    expected = oracles.classify(frame, lbsp, sample_colors(model), codes, r_map)
    np.testing.assert_array_equal(classify(frame, lbsp, model, r_map), expected)


def test_larger_r_never_adds_foreground(rs):
    frame, lbsp, model, _, r_map = random_instance(rs)
    lo = classify(frame, lbsp, model, r_map)
    hi = classify(frame, lbsp, model, r_map + 1.0)
    assert not ((hi == 255) & (lo == 0)).any()


def test_distance_examples():
    frame = np.full((5, 5, 3), 100, np.uint8)
    lbsp = compute_lbsp(frame)
    model = init_model(frame, lbsp, CounterRng(0))
    assert (min_distance(frame, lbsp, model) == 0).all()
    black = np.zeros((5, 5, 3), np.uint8)
    model.colors[:] = 255
    model.packed[:] = 0
    # black frame: all codes 0xFFFF vs stored 0 -> maximal hamming and L1
    assert np.allclose(min_distance(black, compute_lbsp(black), model), 1.0)


def test_distance_matches_oracle(rs):
    frame, lbsp, model, codes, r_map = random_instance(rs, h=6, w=7)
    expected = oracles.min_distance(frame, lbsp, sample_colors(model), codes)
    _, got = classify_with_distance(frame, lbsp, model, r_map)
    np.testing.assert_allclose(got, expected, rtol=0, atol=1e-12)
    np.testing.assert_allclose(min_distance(frame, lbsp, model), expected, rtol=0, atol=1e-12)


def test_threads_agree(rs):
    frame, lbsp, model, _, r_map = random_instance(rs, h=40, w=30)
    a = classify_with_distance(frame, lbsp, model, r_map, threads=1)
    b = classify_with_distance(frame, lbsp, model, r_map, threads=6)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])


def test_bad_params():
    with pytest.raises(ValueError):
        ThresholdParams(min_matches=0)
    with pytest.raises(ValueError):
        ThresholdParams(r0_color=0)
