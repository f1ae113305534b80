"""Streaming variance-threshold feature selection.

A variance floor is learned once on the cold-start chunk (10th percentile
of the per-feature variance distribution, same rounded-index rule as the
window quartiles).  After calibration the selector keeps per-feature
running variances and recomputes the active mask on every incoming sample:
a feature is kept iff its running variance is at least the threshold.

Learners need a stable feature index space, so masking zeroes inactive
features instead of re-indexing the vector.  Features may re-enter once
their running variance crosses the threshold; every flip is logged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .windows import percentile_index


@dataclass
class MaskChange:
    sample_index: int
    feature_index: int
    active: bool

    def as_line(self) -> str:
        return f"{self.sample_index}\t{self.feature_index}\t{'on' if self.active else 'off'}"


def batch_feature_variances(samples: np.ndarray) -> np.ndarray:
    """Two-pass population variance per column of a (n_samples, n_features) matrix."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2:
        raise ValueError("expected a 2-D sample matrix")
    return samples.var(axis=0)


def calibrate_threshold(cold_start_samples: np.ndarray) -> float:
    """Variance floor: 10th percentile of per-feature variances on the chunk."""
    samples = np.asarray(cold_start_samples, dtype=float)
    if samples.ndim != 2 or samples.shape[0] < 2:
        raise ValueError("threshold calibration needs at least 2 cold-start samples")
    variances = np.sort(batch_feature_variances(samples))
    idx = percentile_index(len(variances), 0.10)
    return float(variances[idx])


@dataclass
class SelectorState:
    """Online per-feature variance tracking plus the active mask."""

    n_features: int
    threshold: float
    count: int = 0
    mean: np.ndarray = field(default=None)  # type: ignore[assignment]
    m2: np.ndarray = field(default=None)  # type: ignore[assignment]
    active: np.ndarray = field(default=None)  # type: ignore[assignment]
    mask_log: list = field(default_factory=list)
    _samples_seen: int = 0

    def __post_init__(self):
        if self.threshold < 0:
            raise ValueError("threshold must be >= 0")
        if self.mean is None:
            self.mean = np.zeros(self.n_features)
        if self.m2 is None:
            self.m2 = np.zeros(self.n_features)
        if self.active is None:
            # Until the first sample arrives every variance is 0; the mask
            # starts from the same rule (0 >= threshold).
            self.active = np.zeros(self.n_features, dtype=bool) | (0.0 >= self.threshold)

    @property
    def variances(self) -> np.ndarray:
        if self.count == 0:
            return np.zeros(self.n_features)
        return self.m2 / self.count

    def update_and_mask(self, vector: np.ndarray) -> np.ndarray:
        """Fold one sample into the running variances, refresh the mask and
        return the vector with inactive features zeroed."""
        x = np.asarray(vector, dtype=float)
        if x.shape != (self.n_features,):
            raise ValueError(
                f"feature vector length {x.shape} does not match manifest ({self.n_features})"
            )
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)

        new_active = self.variances >= self.threshold
        flips = np.nonzero(new_active != self.active)[0]
        for f in flips:
            self.mask_log.append(MaskChange(self._samples_seen, int(f), bool(new_active[f])))
        self.active = new_active
        self._samples_seen += 1

        out = x.copy()
        out[~self.active] = 0.0
        return out

    def mask(self, vector: np.ndarray) -> np.ndarray:
        """Apply the current mask without updating statistics (idempotent)."""
        out = np.asarray(vector, dtype=float).copy()
        out[~self.active] = 0.0
        return out
