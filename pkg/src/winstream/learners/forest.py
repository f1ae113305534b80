"""Adaptive random forest of Hoeffding trees.

Each member trains on Poisson-resampled copies of the sample and restricts
its splits to a random feature subset drawn at construction.  Per-member
warning detectors spawn a background tree trained in the shadow; drift
detectors swap it in.  Prediction is an unweighted majority vote and the
confidence is the voting fraction.
"""

from __future__ import annotations

import numpy as np

from .adwin import Adwin
from .base import DecisionPath, Prediction, UNIFORM_PREDICTION, prediction_from_scores
from .tree import HoeffdingTree


class _Member:
    __slots__ = ("tree", "warning", "drift", "background")

    def __init__(self, tree: HoeffdingTree, warning_delta: float, drift_delta: float):
        self.tree = tree
        self.warning = Adwin(delta=warning_delta)
        self.drift = Adwin(delta=drift_delta)
        self.background: HoeffdingTree | None = None

    def reset_detectors(self, warning_delta: float, drift_delta: float) -> None:
        self.warning = Adwin(delta=warning_delta)
        self.drift = Adwin(delta=drift_delta)


class AdaptiveRandomForest:
    def __init__(
        self,
        n_features: int,
        n_models: int = 50,
        subset_size: int = 50,
        lam: float = 10.0,
        seed: int = 1,
        drift_detection: bool = True,
        warning_delta: float = 0.01,
        drift_delta: float = 0.002,
        tree_kwargs: dict | None = None,
    ):
        if n_models < 1 or subset_size < 1 or lam <= 0:
            raise ValueError("forest hyperparameters must be positive")
        self.n_features = n_features
        self.n_models = n_models
        self.subset_size = min(subset_size, n_features)
        self.lam = lam
        self.drift_detection = drift_detection
        self.warning_delta = warning_delta
        self.drift_delta = drift_delta
        # member-tree defaults follow the adaptive-forest literature: eager
        # splits (short grace, loose confidence), adaptation left to the
        # member-level detectors rather than in-tree alternates
        self.tree_kwargs = dict(tree_kwargs or {})
        self.tree_kwargs.setdefault("max_depth", 50)
        self.tree_kwargs.setdefault("tie_threshold", 0.05)
        self.tree_kwargs.setdefault("max_size", 2000)
        self.tree_kwargs.setdefault("grace_period", 50.0)
        self.tree_kwargs.setdefault("split_confidence", 0.01)
        self.tree_kwargs.setdefault("adaptive", False)
        self.tree_kwargs.setdefault("leaf_prediction", "nba")
        self.rng = np.random.default_rng(seed)
        self.members = [self._new_member() for _ in range(n_models)]
        self.samples_seen = 0

    def _new_tree(self) -> HoeffdingTree:
        subset = np.sort(self.rng.choice(self.n_features, size=self.subset_size, replace=False))
        return HoeffdingTree(self.n_features, feature_indices=subset, **self.tree_kwargs)

    def _new_member(self) -> _Member:
        return _Member(self._new_tree(), self.warning_delta, self.drift_delta)

    def _votes(self, x: np.ndarray) -> np.ndarray:
        votes = np.zeros(2)
        for member in self.members:
            votes[member.tree.predict(x).label] += 1.0
        return votes

    def predict(self, x: np.ndarray) -> Prediction:
        if self.samples_seen == 0:
            return UNIFORM_PREDICTION
        x = np.asarray(x, dtype=float)
        return prediction_from_scores(self._votes(x))

    def learn_one(self, x: np.ndarray, y: int) -> None:
        x = np.asarray(x, dtype=float)
        self.samples_seen += 1
        weights = self.rng.poisson(self.lam, self.n_models)
        for i, member in enumerate(self.members):
            if self.drift_detection:
                error = int(member.tree.predict(x).label != y)
                if member.warning.update(error) and member.background is None:
                    member.background = self._new_tree()
                if member.drift.update(error):
                    member.tree = member.background if member.background is not None else self._new_tree()
                    member.background = None
                    member.reset_detectors(self.warning_delta, self.drift_delta)
            w = float(weights[i])
            if w > 0:
                member.tree.learn_one(x, y, weight=w)
                if member.background is not None:
                    member.background.learn_one(x, y, weight=w)

    def decision_paths(self, x: np.ndarray) -> list[DecisionPath]:
        x = np.asarray(x, dtype=float)
        return [member.tree.decision_paths(x)[0] for member in self.members]
