import numpy as np
import pytest
from numba import set_num_threads

from oracles import ScalarGmmReference, brute_refine
from shuttle_annotate.background import (
    BackgroundModel,
    GmmParams,
    MorphConfig,
    dilate_mask,
    refine,
)


def _feed_constant(model, value, n, w=32, h=24):
    frame = np.full((h, w, 3), value, dtype=np.uint8)
    mask = None
    for _ in range(n):
        mask = model.update(frame)
    return mask


def test_constant_input_all_background():
    model = BackgroundModel(32, 24)
    mask = _feed_constant(model, 50, 200)
    assert mask.sum() == 0


def test_step_patch_exactly_foreground():
    model = BackgroundModel(32, 24)
    _feed_constant(model, 50, 200)
    frame = np.full((24, 32, 3), 50, dtype=np.uint8)
    frame[5:15, 8:18] = 200
    mask = model.update(frame)
    expected = np.zeros((24, 32), dtype=bool)
    expected[5:15, 8:18] = True
    assert np.array_equal(mask, expected)


@pytest.mark.parametrize("alpha", [0.01, 0.002])
def test_scalar_trace_matches_reference(alpha):
    # scripted 1-pixel sequence: 50 for 100 frames, then three 200-frames
    params = GmmParams(learning_rate=alpha)
    model = BackgroundModel(1, 1, params, dtype=np.float64)
    ref = ScalarGmmReference(learning_rate=alpha)
    samples = [(50, 50, 50)] * 100 + [(200, 200, 200)] * 3
    for s in samples:
        frame = np.array(s, dtype=np.uint8).reshape(1, 1, 3)
        fg_model = bool(model.update(frame)[0, 0])
        fg_ref = ref.update(s)
        assert fg_model == fg_ref
        k = int(model.mode_counts[0, 0])
        assert k == len(ref.weights)
        w = model.weights[0, 0, :k]
        v = model.variances[0, 0, :k]
        m = model.means[0, 0, :k]
        assert np.allclose(w, ref.weights, atol=1e-9, rtol=0)
        assert np.allclose(v, ref.variances, atol=1e-9, rtol=0)
        assert np.allclose(m, np.array(ref.means), atol=1e-9, rtol=0)


def test_scalar_trace_randomized_samples(rng):
    params = GmmParams(learning_rate=0.05, max_modes=3)
    model = BackgroundModel(1, 1, params, dtype=np.float64)
    ref = ScalarGmmReference(learning_rate=0.05, max_modes=3)
    values = rng.integers(0, 256, (120, 3))
    for s in values:
        frame = s.astype(np.uint8).reshape(1, 1, 3)
        assert bool(model.update(frame)[0, 0]) == ref.update(tuple(int(v) for v in s))
        k = int(model.mode_counts[0, 0])
        assert np.allclose(model.weights[0, 0, :k], ref.weights, atol=1e-9, rtol=0)
        assert np.allclose(model.variances[0, 0, :k], ref.variances, atol=1e-9, rtol=0)
        assert np.allclose(model.means[0, 0, :k], np.array(ref.means), atol=1e-9, rtol=0)


def test_weights_sum_to_one_after_every_update(rng):
    model = BackgroundModel(16, 12)
    for _ in range(50):
        frame = rng.integers(0, 256, (12, 16, 3), dtype=np.uint8)
        model.update(frame)
        k = model.mode_counts
        sums = model.weights.sum(axis=2)
        assert np.all(np.abs(sums - 1.0) < 1e-6)
        assert np.all(k >= 1)


def test_variance_clamped(rng):
    params = GmmParams(variance_min=16.0, variance_max=1125.0)
    model = BackgroundModel(8, 8, params)
    for _ in range(300):
        frame = rng.integers(0, 256, (8, 8, 3), dtype=np.uint8)
        model.update(frame)
        k = model.mode_counts
        for y in range(8):
            for x in range(8):
                v = model.variances[y, x, : k[y, x]]
                assert np.all(v >= 16.0) and np.all(v <= 1125.0)


def test_modes_sorted_by_weight_descending(rng):
    model = BackgroundModel(8, 8)
    for _ in range(100):
        frame = rng.integers(0, 256, (8, 8, 3), dtype=np.uint8)
        model.update(frame)
    k = model.mode_counts
    for y in range(8):
        for x in range(8):
            w = model.weights[y, x, : k[y, x]]
            assert np.all(np.diff(w) <= 1e-12)


def test_convergence_on_noisy_constant_input(rng):
    model = BackgroundModel(64, 48)
    base = np.full((48, 64, 3), 90.0)
    mask = None
    for i in range(120):
        frame = np.clip(base + rng.normal(0, 2, base.shape), 0, 255).astype(np.uint8)
        mask = model.update(frame)
    assert mask.mean() < 0.001


def test_dimension_mismatch_fatal():
    model = BackgroundModel(32, 24)
    with pytest.raises(ValueError):
        model.update(np.zeros((24, 16, 3), np.uint8))


def test_parallel_determinism(rng):
    frames = [rng.integers(0, 256, (24, 32, 3), dtype=np.uint8) for _ in range(30)]
    results = {}
    for threads in (1, 2):
        set_num_threads(threads)
        model = BackgroundModel(32, 24)
        masks = [model.update(f).copy() for f in frames]
        results[threads] = (
            masks,
            model.weights.copy(),
            model.means.copy(),
            model.variances.copy(),
            model.mode_counts.copy(),
        )
    for a, b in zip(results[1][0], results[2][0]):
        assert np.array_equal(a, b)
    for a, b in zip(results[1][1:], results[2][1:]):
        assert np.array_equal(a, b)


def test_gmm_params_validation():
    with pytest.raises(ValueError):
        GmmParams(learning_rate=0.0)
    with pytest.raises(ValueError):
        GmmParams(background_ratio=1.0)
    with pytest.raises(ValueError):
        GmmParams(initial_variance=10.0, variance_min=16.0)


# ---------------------------------------------------------------------------
# refine
# ---------------------------------------------------------------------------


def test_refine_removes_isolated_pixel():
    mask = np.zeros((9, 9), dtype=bool)
    mask[4, 4] = True
    assert refine(mask, MorphConfig()).sum() == 0


def test_closing_fills_center_hole():
    # closing stage alone: dilation bridges the 1-pixel hole
    mask = np.zeros((9, 9), dtype=bool)
    mask[2:7, 2:7] = True
    mask[4, 4] = False
    out = refine(mask, MorphConfig(open_iterations=0, close_iterations=1))
    expected = np.zeros((9, 9), dtype=bool)
    expected[2:7, 2:7] = True
    assert np.array_equal(out, expected)


def test_refine_fills_center_hole_of_large_square():
    # the full open-then-close chain needs a 7x7 square to survive opening
    mask = np.zeros((11, 11), dtype=bool)
    mask[2:9, 2:9] = True
    mask[5, 5] = False
    out = refine(mask, MorphConfig())
    expected = np.zeros((11, 11), dtype=bool)
    expected[2:9, 2:9] = True
    assert np.array_equal(out, expected)


@pytest.mark.parametrize("element", [(3, 3), (3, 5), (5, 3)])
@pytest.mark.parametrize("iters", [(1, 1), (2, 1), (1, 2)])
def test_refine_matches_brute_force(rng, element, iters):
    cfg = MorphConfig(
        structuring_element=element, open_iterations=iters[0], close_iterations=iters[1]
    )
    for _ in range(25):
        mask = rng.random((64, 64)) < 0.35
        expected = brute_refine(mask, element, iters[0], iters[1])
        assert np.array_equal(refine(mask, cfg), expected)


def test_refine_idempotent_on_large_components(rng):
    cfg = MorphConfig()
    for _ in range(20):
        mask = np.zeros((64, 64), dtype=bool)
        for _ in range(4):
            y = int(rng.integers(0, 48))
            x = int(rng.integers(0, 48))
            h = int(rng.integers(5, 12))
            w = int(rng.integers(5, 12))
            mask[y : y + h, x : x + w] = True
        once = refine(mask, cfg)
        twice = refine(once, cfg)
        assert np.array_equal(once, twice)


def test_morph_config_rejects_even_elements():
    with pytest.raises(ValueError):
        MorphConfig(structuring_element=(2, 3))


def test_dilate_mask_radius():
    mask = np.zeros((11, 11), dtype=bool)
    mask[5, 5] = True
    out = dilate_mask(mask, 2)
    expected = np.zeros((11, 11), dtype=bool)
    expected[3:8, 3:8] = True
    assert np.array_equal(out, expected)
    assert np.array_equal(dilate_mask(mask, 0), mask)
