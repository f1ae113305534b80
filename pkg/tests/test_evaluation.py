import numpy as np
import pytest

from winstream.evaluation import (
    SCENARIOS,
    LogEntry,
    PrequentialRunner,
    compute_metrics,
    grid_search,
    run_nested,
    run_prequential,
)
from winstream.manifest import FeatureManifest
from winstream.selection import SelectorState


class StubSample:
    def __init__(self, index, x, label):
        self.index = index
        self.label = label
        self.key = ("d", "e", str(index), "m")
        self._x = np.asarray(x, dtype=float)
        self.in_game = self._x[:39]

    def vector(self):
        return self._x


class StubScenario:
    id = "S"

    def __init__(self, idx):
        self._idx = np.asarray(idx)

    def feature_indices(self, manifest):
        return self._idx


class RecordingLearner:
    """Separable-threshold learner that records call ordering."""

    def __init__(self):
        self.calls = []
        self.mean = 0.0
        self.n = 0

    def predict(self, x):
        from winstream.learners import prediction_from_scores

        self.calls.append(("predict", float(x[0])))
        label = 0 if x[0] <= self.mean else 1
        scores = np.array([1.0, 0.0]) if label == 0 else np.array([0.0, 1.0])
        return prediction_from_scores(scores)

    def learn_one(self, x, y):
        self.calls.append(("learn", float(x[0])))
        self.n += 1
        self.mean += (x[0] - self.mean) / self.n


def make_stream(n, n_features=279, seed=0, labeler=None):
    rng = np.random.default_rng(seed)
    for i in range(n):
        x = rng.normal(size=n_features)
        y = int(labeler(i, x)) if labeler else int(x[0] > 0)
        yield StubSample(i, x, y)


MANIFEST = FeatureManifest(map_vocabulary=("a", "b", "c", "d", "e", "f", "g"))


class TestComputeMetrics:
    def test_hand_confusion(self):
        log = (
            [LogEntry(i, 0, 0, 1.0, 9) for i in range(9)]      # TP for class 0
            + [LogEntry(9, 0, 1, 1.0, 9)]                       # FN
            + [LogEntry(10, 1, 0, 1.0, 9), LogEntry(11, 1, 0, 1.0, 9)]  # FP
            + [LogEntry(12 + i, 1, 1, 1.0, 9) for i in range(8)]        # TN
        )
        m = compute_metrics(log)
        assert m.accuracy == pytest.approx(0.85)
        assert m.precision[0] == pytest.approx(9 / 11)
        assert m.recall[0] == pytest.approx(0.9)
        assert m.macro_precision == pytest.approx((9 / 11 + 8 / 9) / 2, abs=1e-12)

    def test_perfect_log(self):
        log = [LogEntry(i, i % 2, i % 2, 1.0, 1) for i in range(10)]
        m = compute_metrics(log)
        assert m.accuracy == 1.0
        assert m.macro_f == 1.0

    def test_zero_division_flagged(self):
        log = [LogEntry(i, 0, 0, 1.0, 1) for i in range(5)]
        m = compute_metrics(log)
        assert "precision_1" in m.zero_division_flags
        assert m.precision[1] == 0.0

    def test_macro_is_mean_of_classes(self):
        rng = np.random.default_rng(1)
        log = [LogEntry(i, int(rng.random() < 0.5), int(rng.random() < 0.5), 0.5, 1) for i in range(200)]
        m = compute_metrics(log)
        assert m.macro_f == pytest.approx(np.mean(m.f_measure), abs=1e-12)
        assert m.macro_recall == pytest.approx(np.mean(m.recall), abs=1e-12)

    def test_empty_log_rejected(self):
        with pytest.raises(ValueError):
            compute_metrics([])

    def test_constant_label_stream_closed_form(self):
        """After the untrained-uniform phase a majority learner is always
        right on a constant-label stream: accuracy 1 on the suffix, macro
        recall exactly 0.5 (the absent class scores zero)."""
        warmup = [LogEntry(0, 0, 1, 0.5, 1)]  # one wrong guess before warm-up
        suffix = [LogEntry(i, 0, 0, 1.0, 1) for i in range(1, 101)]
        mixed = compute_metrics(warmup + suffix)
        assert mixed.accuracy == pytest.approx(100 / 101)
        post = compute_metrics(suffix)
        assert post.accuracy == 1.0
        assert post.macro_recall == pytest.approx(0.5)  # absent class recalls 0
        assert "recall_1" in post.zero_division_flags


class TestPrequential:
    def test_decimation_arithmetic(self):
        scen = StubScenario(np.arange(279))
        learner = RecordingLearner()
        sel = SelectorState(n_features=279, threshold=0.0)
        metrics, log = run_prequential(make_stream(100), learner, sel, scen, MANIFEST)
        assert metrics.n_evaluated == 10
        assert [e.index for e in log] == list(range(0, 100, 10))

    def test_phase_shifts_selection(self):
        scen = StubScenario(np.arange(279))
        learner = RecordingLearner()
        sel = SelectorState(n_features=279, threshold=0.0)
        _, log = run_prequential(make_stream(40), learner, sel, scen, MANIFEST, phase=3)
        assert [e.index for e in log] == [3, 13, 23, 33]

    def test_test_before_train_ordering(self):
        scen = StubScenario(np.arange(279))
        learner = RecordingLearner()
        sel = SelectorState(n_features=279, threshold=0.0)
        run_prequential(make_stream(50), learner, sel, scen, MANIFEST)
        kinds = [k for k, _ in learner.calls]
        assert kinds == ["predict", "learn"] * 5
        # the predicted value for each step is the same vector learned after
        for (pk, pv), (lk, lv) in zip(learner.calls[::2], learner.calls[1::2]):
            assert pv == lv

    def test_logged_prediction_is_pre_update(self):
        """A learner that would answer differently after its own update must
        have the before-update answer logged."""
        scen = StubScenario(np.array([0]))

        class FlipLearner:
            def __init__(self):
                self.seen = 0

            def predict(self, x):
                from winstream.learners import prediction_from_scores

                label = self.seen % 2
                s = np.array([1.0, 0.0]) if label == 0 else np.array([0.0, 1.0])
                return prediction_from_scores(s)

            def learn_one(self, x, y):
                self.seen += 1

        learner = FlipLearner()
        sel = SelectorState(n_features=1, threshold=0.0)
        _, log = run_prequential(make_stream(30, n_features=279), learner, sel, scen, MANIFEST)
        assert [e.predicted for e in log] == [0, 1, 0]

    def test_deterministic_given_seed(self):
        from winstream.learners import make_learner

        def run():
            scen = StubScenario(np.arange(50))
            learner = make_learner("arfc", n_features=50, seed=5, n_models=8, subset_size=10)
            sel = SelectorState(n_features=50, threshold=0.0)
            _, log = run_prequential(
                make_stream(300, seed=4), learner, sel, scen, MANIFEST, decimation=3)
            return [(e.predicted, e.confidence) for e in log]

        assert run() == run()

    def test_empty_after_decimation_rejected(self):
        scen = StubScenario(np.arange(279))
        learner = RecordingLearner()
        sel = SelectorState(n_features=279, threshold=0.0)
        with pytest.raises(ValueError):
            run_prequential(iter([]), learner, sel, scen, MANIFEST)

    def test_runner_step_returns_one_entry(self):
        scen = StubScenario(np.arange(279))
        runner = PrequentialRunner(
            make_stream(100), RecordingLearner(),
            SelectorState(n_features=279, threshold=0.0), scen, MANIFEST)
        entry = runner.step()
        assert entry.index == 0
        entry = runner.step()
        assert entry.index == 10
        assert len(runner.log) == 2


class TestNested:
    def test_single_block_equals_prequential(self):
        scen = StubScenario(np.arange(279))

        def stream():
            return make_stream(40, seed=9)

        result = run_nested(stream(), RecordingLearner,
                            lambda: SelectorState(n_features=279, threshold=0.0),
                            scen, MANIFEST, block_size=40)
        metrics, _ = run_prequential(stream(), RecordingLearner(),
                                     SelectorState(n_features=279, threshold=0.0),
                                     scen, MANIFEST)
        assert result.n_blocks == 1
        assert result.per_block[0].accuracy == metrics.accuracy

    def test_blocks_restart_learner(self):
        scen = StubScenario(np.arange(279))
        built = []

        def factory():
            learner = RecordingLearner()
            built.append(learner)
            return learner

        run_nested(make_stream(90), factory,
                   lambda: SelectorState(n_features=279, threshold=0.0),
                   scen, MANIFEST, block_size=30)
        assert len(built) == 3

    def test_trailing_partial_block_dropped(self):
        scen = StubScenario(np.arange(279))
        result = run_nested(make_stream(75), RecordingLearner,
                            lambda: SelectorState(n_features=279, threshold=0.0),
                            scen, MANIFEST, block_size=30)
        assert result.n_blocks == 2

    def test_short_stream_rejected(self):
        scen = StubScenario(np.arange(279))
        with pytest.raises(ValueError):
            run_nested(make_stream(5), RecordingLearner,
                       lambda: SelectorState(n_features=279, threshold=0.0),
                       scen, MANIFEST, block_size=100)

    def test_mean_matches_hand_average(self):
        scen = StubScenario(np.arange(279))
        result = run_nested(make_stream(200, seed=2), RecordingLearner,
                            lambda: SelectorState(n_features=279, threshold=0.0),
                            scen, MANIFEST, block_size=50)
        assert result.mean.accuracy == pytest.approx(
            np.mean([b.accuracy for b in result.per_block]))


class TestGridSearch:
    def test_single_point(self):
        scen = StubScenario(np.arange(10))
        best, results = grid_search(
            "hatc", {"max_depth": (5,)},
            lambda: make_stream(50, n_features=279, seed=3),
            lambda: SelectorState(n_features=10, threshold=0.0),
            n_features=10, scenario=scen, manifest=MANIFEST, decimation=2)
        assert best == {"max_depth": 5}
        assert len(results) == 1

    def test_dominant_point_selected(self):
        scen = StubScenario(np.array([0, 1]))

        def labeler(i, x):
            return int(x[0] > 0)

        best, results = grid_search(
            "arfc", {"n_models": (1, 10), "subset_size": (2,)},
            lambda: make_stream(400, n_features=279, seed=11, labeler=labeler),
            lambda: SelectorState(n_features=2, threshold=0.0),
            n_features=2, scenario=scen, manifest=MANIFEST, decimation=2)
        accs = dict((tuple(p.items()), a) for p, a in results)
        assert best["n_models"] == max(results, key=lambda r: r[1])[0]["n_models"]

    def test_empty_axis_rejected(self):
        scen = StubScenario(np.arange(10))
        with pytest.raises(ValueError):
            grid_search("hatc", {"max_depth": ()}, lambda: make_stream(10),
                        lambda: SelectorState(n_features=10, threshold=0.0),
                        n_features=10, scenario=scen, manifest=MANIFEST)

    def test_hyperparameterless_model_single_point(self):
        scen = StubScenario(np.arange(10))
        best, results = grid_search(
            "gnb", {}, lambda: make_stream(30, n_features=279, seed=1),
            lambda: SelectorState(n_features=10, threshold=0.0),
            n_features=10, scenario=scen, manifest=MANIFEST, decimation=2)
        assert best == {}
        assert len(results) == 1


class TestScenarios:
    def test_a_subset_of_b(self):
        a = set(SCENARIOS["A"].feature_indices(MANIFEST).tolist())
        b = set(SCENARIOS["B"].feature_indices(MANIFEST).tolist())
        assert a < b
        assert len(a) == 15
        assert len(b) == 279
