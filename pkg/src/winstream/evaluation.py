"""Prequential test-then-train harness, metrics and hyperparameter search.

One in ten samples is kept (index-based decimation, configurable phase);
each kept sample flows selector -> predict -> log -> learn, so the logged
prediction never sees its own sample's influence.  Nested validation cuts
the stream into fixed-size blocks and restarts the classifier and selector
per block while player histories keep accumulating upstream.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .learners import make_learner
from .manifest import FeatureManifest
from .selection import SelectorState, calibrate_threshold


@dataclass(frozen=True)
class ScenarioSpec:
    id: str
    groups: tuple[str, ...]

    def feature_indices(self, manifest: FeatureManifest) -> np.ndarray:
        return np.asarray(manifest.indices_for_groups(self.groups), dtype=int)


SCENARIOS = {
    "A": ScenarioSpec("A", ("date", "map", "score", "rank")),
    "B": ScenarioSpec("B", ("date", "map", "score", "rank", "team_skill", "pre_game")),
}


@dataclass
class LogEntry:
    index: int
    label: int
    predicted: int
    confidence: float
    n_active: int
    key: tuple = ()


@dataclass
class MetricsSnapshot:
    n_evaluated: int
    confusion: tuple  # ((tn-style grid)) rows = true class, cols = predicted
    accuracy: float
    precision: tuple
    recall: tuple
    f_measure: tuple
    macro_precision: float
    macro_recall: float
    macro_f: float
    wall_clock_seconds: float
    samples_per_second: float
    zero_division_flags: tuple = ()

    def to_dict(self) -> dict:
        return {
            "n_evaluated": self.n_evaluated,
            "confusion": [list(row) for row in self.confusion],
            "accuracy": self.accuracy,
            "precision": {"macro": self.macro_precision, "team1": self.precision[0], "team2": self.precision[1]},
            "recall": {"macro": self.macro_recall, "team1": self.recall[0], "team2": self.recall[1]},
            "f_measure": {"macro": self.macro_f, "team1": self.f_measure[0], "team2": self.f_measure[1]},
            "wall_clock_seconds": self.wall_clock_seconds,
            "samples_per_second": self.samples_per_second,
        }

    def table_row(self, name: str) -> str:
        return (
            f"{name:<6} {self.accuracy * 100:6.2f} "
            f"{self.macro_precision * 100:6.2f} {self.precision[0] * 100:6.2f} {self.precision[1] * 100:6.2f} "
            f"{self.macro_recall * 100:6.2f} {self.recall[0] * 100:6.2f} {self.recall[1] * 100:6.2f} "
            f"{self.macro_f * 100:6.2f} {self.f_measure[0] * 100:6.2f} {self.f_measure[1] * 100:6.2f} "
            f"{self.wall_clock_seconds:8.2f}"
        )


TABLE_HEADER = (
    "model    acc   precM  prec1  prec2  recM   rec1   rec2   fM     f1     f2     time(s)"
)


def compute_metrics(log: list[LogEntry], wall_clock: float = 0.0) -> MetricsSnapshot:
    if not log:
        raise ValueError("cannot compute metrics over an empty prediction log")
    confusion = np.zeros((2, 2), dtype=int)
    for entry in log:
        confusion[entry.label, entry.predicted] += 1
    total = confusion.sum()
    accuracy = float(np.trace(confusion) / total)
    precision, recall, f_measure = [], [], []
    flags = []
    for c in (0, 1):
        tp = confusion[c, c]
        predicted_c = confusion[:, c].sum()
        actual_c = confusion[c, :].sum()
        if predicted_c == 0:
            flags.append(f"precision_{c}")
        if actual_c == 0:
            flags.append(f"recall_{c}")
        p = float(tp / predicted_c) if predicted_c else 0.0
        r = float(tp / actual_c) if actual_c else 0.0
        precision.append(p)
        recall.append(r)
        f_measure.append(2 * p * r / (p + r) if (p + r) else 0.0)
    return MetricsSnapshot(
        n_evaluated=int(total),
        confusion=tuple(tuple(int(v) for v in row) for row in confusion),
        accuracy=accuracy,
        precision=tuple(precision),
        recall=tuple(recall),
        f_measure=tuple(f_measure),
        macro_precision=float(np.mean(precision)),
        macro_recall=float(np.mean(recall)),
        macro_f=float(np.mean(f_measure)),
        wall_clock_seconds=wall_clock,
        samples_per_second=float(total / wall_clock) if wall_clock > 0 else 0.0,
        zero_division_flags=tuple(flags),
    )


class PrequentialRunner:
    """Stateful test-then-train loop over an already-fused sample stream.

    The runner owns the kept-sample indexing so a service session can drive
    it step by step; :func:`run_prequential` is the batch wrapper.
    """

    def __init__(self, stream, learner, selector: SelectorState, scenario: ScenarioSpec,
                 manifest: FeatureManifest, decimation: int = 10, phase: int = 0,
                 observer=None):
        if decimation < 1 or not 0 <= phase < decimation:
            raise ValueError("decimation must be >= 1 with 0 <= phase < decimation")
        self.stream = iter(stream)
        self.learner = learner
        self.selector = selector
        self.scenario = scenario
        self.manifest = manifest
        self.decimation = decimation
        self.phase = phase
        self.observer = observer
        self.indices = scenario.feature_indices(manifest)
        self._needs_pre_game = bool((self.indices >= manifest.n_in_game).any())
        self.log: list[LogEntry] = []
        self.wall_clock = 0.0
        self._position = 0
        self.exhausted = False

    def _extract(self, sample) -> np.ndarray:
        if self._needs_pre_game:
            return sample.vector()[self.indices]
        return sample.in_game[self.indices]

    def step(self):
        """Advance to the next kept sample; returns its LogEntry or None."""
        for sample in self.stream:
            i = self._position
            self._position += 1
            if i % self.decimation != self.phase:
                continue
            x = self._extract(sample)
            t0 = time.perf_counter()
            masked = self.selector.update_and_mask(x)
            prediction = self.learner.predict(masked)
            self.wall_clock += time.perf_counter() - t0
            entry = LogEntry(
                index=i,
                label=sample.label,
                predicted=prediction.label,
                confidence=prediction.confidence,
                n_active=int(self.selector.active.sum()),
                key=sample.key,
            )
            self.log.append(entry)
            if self.observer is not None:
                self.observer(sample, masked, prediction, entry)
            t0 = time.perf_counter()
            self.learner.learn_one(masked, sample.label)
            self.wall_clock += time.perf_counter() - t0
            return entry
        self.exhausted = True
        return None

    def run(self, max_steps: int | None = None) -> "PrequentialRunner":
        steps = 0
        while max_steps is None or steps < max_steps:
            if self.step() is None:
                break
            steps += 1
        return self

    def metrics(self) -> MetricsSnapshot:
        return compute_metrics(self.log, self.wall_clock)


def run_prequential(stream, learner, selector, scenario, manifest,
                    decimation: int = 10, phase: int = 0, max_steps: int | None = None):
    runner = PrequentialRunner(stream, learner, selector, scenario, manifest,
                               decimation=decimation, phase=phase).run(max_steps)
    if not runner.log:
        raise ValueError("stream produced no evaluated samples after decimation")
    return runner.metrics(), runner.log


def scenario_threshold(chunk_matrix: np.ndarray, scenario: ScenarioSpec,
                       manifest: FeatureManifest) -> float:
    idx = scenario.feature_indices(manifest)
    return calibrate_threshold(chunk_matrix[:, idx])


def make_selector(chunk_matrix: np.ndarray, scenario: ScenarioSpec,
                  manifest: FeatureManifest) -> SelectorState:
    idx = scenario.feature_indices(manifest)
    return SelectorState(n_features=len(idx), threshold=scenario_threshold(chunk_matrix, scenario, manifest))


@dataclass
class NestedResult:
    per_block: list
    mean: MetricsSnapshot | None
    n_blocks: int

    def mean_accuracy(self) -> float:
        return float(np.mean([m.accuracy for m in self.per_block]))


def run_nested(stream, learner_factory, selector_factory, scenario, manifest,
               block_size: int = 10_000, decimation: int = 10) -> NestedResult:
    """Restart classifier and selector every ``block_size`` stream samples;
    prequential evaluation inside each block, trailing partial block dropped."""
    blocks: list[MetricsSnapshot] = []
    learner, selector = learner_factory(), selector_factory()
    runner = None
    block_log: list[LogEntry] = []
    block_wall = 0.0
    in_block = 0

    def flush(final_partial: bool):
        nonlocal block_log, block_wall
        if block_log and not final_partial:
            blocks.append(compute_metrics(block_log, block_wall))
        block_log, block_wall = [], 0.0

    indices = scenario.feature_indices(manifest)
    needs_pre = bool((indices >= manifest.n_in_game).any())
    for i, sample in enumerate(stream):
        if in_block == block_size:
            flush(final_partial=False)
            learner, selector = learner_factory(), selector_factory()
            in_block = 0
        if in_block % decimation == 0:
            x = sample.vector()[indices] if needs_pre else sample.in_game[indices]
            t0 = time.perf_counter()
            masked = selector.update_and_mask(x)
            prediction = learner.predict(masked)
            block_wall += time.perf_counter() - t0
            block_log.append(LogEntry(index=i, label=sample.label, predicted=prediction.label,
                                      confidence=prediction.confidence,
                                      n_active=int(selector.active.sum())))
            t0 = time.perf_counter()
            learner.learn_one(masked, sample.label)
            block_wall += time.perf_counter() - t0
        in_block += 1
    if in_block == block_size:
        flush(final_partial=False)
    else:
        flush(final_partial=True)
    if not blocks:
        raise ValueError(f"stream shorter than one block of {block_size}")

    mean = None
    if blocks:
        mean = MetricsSnapshot(
            n_evaluated=sum(b.n_evaluated for b in blocks),
            confusion=tuple(
                tuple(int(sum(b.confusion[r][c] for b in blocks)) for c in (0, 1)) for r in (0, 1)
            ),
            accuracy=float(np.mean([b.accuracy for b in blocks])),
            precision=tuple(np.mean([b.precision for b in blocks], axis=0)),
            recall=tuple(np.mean([b.recall for b in blocks], axis=0)),
            f_measure=tuple(np.mean([b.f_measure for b in blocks], axis=0)),
            macro_precision=float(np.mean([b.macro_precision for b in blocks])),
            macro_recall=float(np.mean([b.macro_recall for b in blocks])),
            macro_f=float(np.mean([b.macro_f for b in blocks])),
            wall_clock_seconds=float(sum(b.wall_clock_seconds for b in blocks)),
            samples_per_second=float(
                sum(b.n_evaluated for b in blocks) / max(sum(b.wall_clock_seconds for b in blocks), 1e-9)
            ),
        )
    return NestedResult(per_block=blocks, mean=mean, n_blocks=len(blocks))


def grid_search(model_name: str, grid: dict, stream_factory, selector_factory,
                n_features: int, scenario, manifest, seed: int = 1,
                decimation: int = 10, max_steps: int | None = None) -> tuple[dict, list]:
    """Evaluate every grid point by prequential accuracy on a stream prefix;
    ties break toward the earliest point in grid order."""
    from .learners import grid_points

    points = grid_points(grid)
    if not points:
        raise ValueError("empty hyperparameter grid")
    results = []
    best, best_acc = None, -1.0
    for point in points:
        learner = make_learner(model_name, n_features=n_features, seed=seed, **point)
        metrics, _ = run_prequential(
            stream_factory(), learner, selector_factory(), scenario, manifest,
            decimation=decimation, max_steps=max_steps,
        )
        results.append((point, metrics.accuracy))
        if metrics.accuracy > best_acc:
            best, best_acc = point, metrics.accuracy
    return best, results
