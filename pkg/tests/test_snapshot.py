import numpy as np
import pytest

from winstream.learners import AdaptiveRandomForest, make_learner
from winstream.snapshot import FORMAT_VERSION, SnapshotError, load_snapshot, save_snapshot


class TestEnvelope:
    def test_round_trip(self, tmp_path):
        payload = {"arrays": np.arange(5.0), "nested": {"a": [1, 2, 3]}}
        path = save_snapshot(payload, tmp_path / "x.snap")
        back = load_snapshot(path)
        assert np.array_equal(back["arrays"], payload["arrays"])
        assert back["nested"] == payload["nested"]

    def test_missing_file(self, tmp_path):
        with pytest.raises(SnapshotError):
            load_snapshot(tmp_path / "absent.snap")

    def test_bad_magic(self, tmp_path):
        f = tmp_path / "junk.snap"
        f.write_bytes(b"not a snapshot at all")
        with pytest.raises(SnapshotError):
            load_snapshot(f)

    def test_corruption_detected(self, tmp_path):
        path = save_snapshot([1, 2, 3], tmp_path / "c.snap")
        raw = path.read_bytes()
        path.write_bytes(raw[:-3] + b"xyz")
        with pytest.raises(SnapshotError, match="integrity"):
            load_snapshot(path)

    def test_version_mismatch(self, tmp_path):
        path = save_snapshot([1], tmp_path / "v.snap")
        raw = path.read_bytes()
        mutated = raw.replace(
            f"version={FORMAT_VERSION}".encode(), f"version={FORMAT_VERSION + 1}".encode(), 1)
        path.write_bytes(mutated)
        with pytest.raises(SnapshotError, match="version"):
            load_snapshot(path)


class TestLearnerRoundTrip:
    def test_forest_predictions_bit_identical(self, tmp_path):
        rng = np.random.default_rng(0)
        forest = AdaptiveRandomForest(n_features=5, n_models=6, subset_size=3, seed=9)
        stream = [(rng.normal(size=5), int(rng.random() < 0.5)) for _ in range(400)]
        for x, y in stream[:200]:
            forest.learn_one(x, y)
        path = save_snapshot(forest, tmp_path / "forest.snap")
        restored = load_snapshot(path)

        for x, y in stream[200:]:
            a = forest.predict(x)
            b = restored.predict(x)
            assert a == b
            forest.learn_one(x, y)
            restored.learn_one(x, y)
        # state advanced identically through another 200 samples
        x = rng.normal(size=5)
        assert forest.predict(x) == restored.predict(x)

    def test_hatc_and_gnb_round_trip(self, tmp_path):
        rng = np.random.default_rng(1)
        for name in ("hatc", "gnb"):
            model = make_learner(name, n_features=4, seed=2)
            for _ in range(300):
                x = rng.normal(size=4)
                model.learn_one(x, int(x[0] > 0))
            restored = load_snapshot(save_snapshot(model, tmp_path / f"{name}.snap"))
            for _ in range(50):
                x = rng.normal(size=4)
                assert model.predict(x) == restored.predict(x)
