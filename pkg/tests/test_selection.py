import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from winstream.selection import SelectorState, batch_feature_variances, calibrate_threshold

from oracles import oracle_batch_variance


def test_running_variance_equals_batch_on_every_prefix():
    rng = np.random.default_rng(3)
    stream = rng.normal(loc=2.0, scale=3.0, size=(1000, 4))
    stream[:, 2] *= 1e-3
    sel = SelectorState(n_features=4, threshold=0.0)
    for i in range(stream.shape[0]):
        sel.update_and_mask(stream[i])
        prefix = stream[: i + 1]
        for f in range(4):
            expected = oracle_batch_variance(prefix[:, f].tolist())
            got = sel.variances[f]
            assert got == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_first_sample_all_variances_zero():
    sel = SelectorState(n_features=3, threshold=0.5)
    out = sel.update_and_mask(np.array([1.0, 2.0, 3.0]))
    assert np.all(sel.variances == 0.0)
    # variance 0 < 0.5 threshold: everything inactive, vector zeroed
    assert np.all(out == 0.0)


def test_zero_threshold_never_drops_varying_feature():
    sel = SelectorState(n_features=2, threshold=0.0)
    for v in ([1.0, 5.0], [2.0, 5.0], [3.0, 5.0]):
        out = sel.update_and_mask(np.array(v))
    assert sel.active.all()
    assert out[0] == 3.0


def test_feature_reenters_when_variance_crosses_threshold():
    sel = SelectorState(n_features=1, threshold=0.01)
    for _ in range(1000):
        sel.update_and_mask(np.array([4.0]))
    assert not sel.active[0]
    rng = np.random.default_rng(0)
    reentered_at = None
    for i in range(500):
        sel.update_and_mask(np.array([4.0 + rng.normal(scale=2.0)]))
        if sel.active[0]:
            reentered_at = i
            break
    assert reentered_at is not None
    flips = [(c.feature_index, c.active) for c in sel.mask_log]
    assert (0, True) in flips


def test_mask_is_idempotent_for_fixed_state():
    sel = SelectorState(n_features=3, threshold=0.1)
    rng = np.random.default_rng(1)
    for _ in range(50):
        sel.update_and_mask(rng.normal(size=3))
    v = rng.normal(size=3)
    once = sel.mask(v)
    twice = sel.mask(once)
    assert np.array_equal(once, twice)


def test_length_mismatch_rejected():
    sel = SelectorState(n_features=3, threshold=0.0)
    with pytest.raises(ValueError):
        sel.update_and_mask(np.zeros(4))


class TestCalibration:
    def test_threshold_is_10th_percentile_of_variances(self):
        rng = np.random.default_rng(5)
        # 20 features with controlled variance ladder
        scales = np.linspace(0.1, 2.0, 20)
        samples = rng.normal(size=(500, 20)) * scales
        threshold = calibrate_threshold(samples)
        variances = np.sort(batch_feature_variances(samples))
        # rounded-index rule: floor(0.1*20 + 0.5) = 2
        assert threshold == variances[2]

    def test_all_constant_features_threshold_zero(self):
        samples = np.ones((10, 4)) * 7.0
        assert calibrate_threshold(samples) == 0.0
        sel = SelectorState(n_features=4, threshold=0.0)
        out = sel.update_and_mask(samples[0])
        # nothing is strictly below a zero threshold
        assert sel.active.all()
        assert np.array_equal(out, samples[0])

    def test_insufficient_samples_rejected(self):
        with pytest.raises(ValueError):
            calibrate_threshold(np.ones((1, 4)))


@settings(max_examples=100, deadline=None)
@given(
    rows=st.lists(
        st.lists(st.floats(min_value=-50, max_value=50, allow_nan=False), min_size=3, max_size=3),
        min_size=1,
        max_size=60,
    )
)
def test_online_variance_matches_batch_property(rows):
    sel = SelectorState(n_features=3, threshold=0.0)
    for row in rows:
        sel.update_and_mask(np.array(row))
    matrix = np.array(rows)
    for f in range(3):
        expected = oracle_batch_variance(matrix[:, f].tolist())
        assert sel.variances[f] == pytest.approx(expected, rel=1e-9, abs=1e-9)
