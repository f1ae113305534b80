"""Incremental Gaussian naive Bayes.

Keeps per-class priors and per-(class, feature) running means/variances via
Welford updates; the posterior multiplies Gaussian likelihoods with a
variance floor so long-constant features cannot zero out the density.
"""

from __future__ import annotations

import numpy as np

from .base import N_CLASSES, PathsUnavailable, Prediction, UNIFORM_PREDICTION, prediction_from_scores


class GaussianNaiveBayes:
    def __init__(self, n_features: int, var_smoothing: float = 1e-9):
        self.n_features = n_features
        self.var_smoothing = var_smoothing
        self.class_counts = np.zeros(N_CLASSES)
        self.mean = np.zeros((N_CLASSES, n_features))
        self.m2 = np.zeros((N_CLASSES, n_features))

    @property
    def total_seen(self) -> float:
        return float(self.class_counts.sum())

    def _variances(self) -> np.ndarray:
        counts = np.maximum(self.class_counts, 1.0)[:, None]
        var = self.m2 / counts
        # absolute floor keyed to the largest observed spread
        floor = self.var_smoothing * max(float(var.max(initial=0.0)), 1.0)
        return var + floor

    def predict(self, x: np.ndarray) -> Prediction:
        if self.total_seen == 0:
            return UNIFORM_PREDICTION
        x = np.asarray(x, dtype=float)
        seen = self.class_counts > 0
        log_scores = np.full(N_CLASSES, -np.inf)
        var = self._variances()
        priors = self.class_counts / self.total_seen
        for c in range(N_CLASSES):
            if not seen[c]:
                continue
            ll = -0.5 * (np.log(2.0 * np.pi * var[c]) + (x - self.mean[c]) ** 2 / var[c])
            log_scores[c] = np.log(priors[c]) + ll.sum()
        shifted = log_scores - log_scores[np.isfinite(log_scores)].max()
        scores = np.where(np.isfinite(shifted), np.exp(shifted), 0.0)
        return prediction_from_scores(scores)

    def learn_one(self, x: np.ndarray, y: int, weight: float = 1.0) -> None:
        x = np.asarray(x, dtype=float)
        self.class_counts[y] += weight
        n = self.class_counts[y]
        delta = x - self.mean[y]
        self.mean[y] += (weight / n) * delta
        self.m2[y] += weight * delta * (x - self.mean[y])

    def decision_paths(self, x):
        raise PathsUnavailable("Gaussian naive Bayes has no decision paths")
