"""Shared online-learner contract: predict with confidence, then learn one."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CLASS_LABELS = ("Team1", "Team2")
N_CLASSES = 2


class PathsUnavailable(TypeError):
    """Raised when decision paths are requested from a non-path model."""


@dataclass(frozen=True)
class Prediction:
    label: int  # 0 = Team1, 1 = Team2
    confidence: float
    scores: tuple[float, float]

    @property
    def label_name(self) -> str:
        return CLASS_LABELS[self.label]


def prediction_from_scores(scores: np.ndarray) -> Prediction:
    """Normalise scores and break argmax ties toward the lower class index."""
    scores = np.asarray(scores, dtype=float)
    total = scores.sum()
    if total <= 0 or not np.isfinite(total):
        scores = np.full(N_CLASSES, 1.0 / N_CLASSES)
    else:
        scores = scores / total
    label = 0 if scores[0] >= scores[1] else 1
    return Prediction(label=label, confidence=float(scores[label]), scores=(float(scores[0]), float(scores[1])))


UNIFORM_PREDICTION = Prediction(label=0, confidence=0.5, scores=(0.5, 0.5))


@dataclass(frozen=True)
class PathStep:
    feature: int
    threshold: float
    branch: str  # "<=" or ">"


@dataclass(frozen=True)
class DecisionPath:
    steps: tuple[PathStep, ...]
    leaf_label: int
    leaf_scores: tuple[float, float]

    @property
    def feature_sequence(self) -> tuple[int, ...]:
        return tuple(step.feature for step in self.steps)


def hoeffding_bound(value_range: float, delta: float, n: float) -> float:
    """Confidence radius sqrt(R^2 ln(1/delta) / (2n))."""
    return float(np.sqrt(value_range * value_range * np.log(1.0 / delta) / (2.0 * n)))
