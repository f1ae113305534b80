"""Adaptive windowing change detector over a 0/1 error stream.

Exponential-histogram variant: the window is kept as buckets of doubling
size with at most ``max_buckets`` per level.  On a (periodic) check, every
bucket boundary splits the window into an old and a recent part; if the two
means differ by more than the confidence radius, the old part is dropped
and drift is signalled.

The variance term of the cut condition uses the Bernoulli identity
sigma^2 = mu(1-mu), which is exact for the 0/1 streams this package feeds
into the detector.
"""

from __future__ import annotations

import math


class Adwin:
    def __init__(self, delta: float = 0.002, check_interval: int = 32, max_buckets: int = 5):
        if not 0 < delta < 1:
            raise ValueError("delta must be in (0, 1)")
        self.delta = delta
        self.check_interval = check_interval
        self.max_buckets = max_buckets
        # level i buckets each hold 2**i observations; lists run oldest-first
        self._bucket_sums: list[list[float]] = [[]]
        self.width = 0
        self.total = 0.0
        self._ticks = 0
        self.n_detections = 0

    @property
    def estimation(self) -> float:
        return self.total / self.width if self.width else 0.0

    def update(self, value: float) -> bool:
        """Add one observation; returns True when drift was detected."""
        self._insert(value)
        self._ticks += 1
        if self._ticks % self.check_interval:
            return False
        return self._detect_and_shrink()

    def _insert(self, value: float) -> None:
        self._bucket_sums[0].append(float(value))
        self.width += 1
        self.total += value
        level = 0
        while len(self._bucket_sums[level]) > self.max_buckets:
            if level + 1 == len(self._bucket_sums):
                self._bucket_sums.append([])
            merged = self._bucket_sums[level][0] + self._bucket_sums[level][1]
            del self._bucket_sums[level][0:2]
            self._bucket_sums[level + 1].append(merged)
            level += 1

    def _drop_oldest(self) -> None:
        for level in range(len(self._bucket_sums) - 1, -1, -1):
            if self._bucket_sums[level]:
                dropped = self._bucket_sums[level].pop(0)
                self.width -= 1 << level
                self.total -= dropped
                return

    def _find_cut(self) -> bool:
        """Scan bucket boundaries oldest-first for a significant mean split."""
        var_w = max(self.estimation * (1.0 - self.estimation), 1e-12)
        log_term = math.log(2.0 * math.log(max(self.width, 2)) / self.delta)
        n0, s0 = 0, 0.0
        for level in range(len(self._bucket_sums) - 1, -1, -1):
            size = 1 << level
            for sum_ in self._bucket_sums[level]:
                n0 += size
                s0 += sum_
                n1 = self.width - n0
                if n0 < 5 or n1 < 5:
                    continue
                mu0 = s0 / n0
                mu1 = (self.total - s0) / n1
                m_inv = 1.0 / n0 + 1.0 / n1
                eps = math.sqrt(2.0 * m_inv * var_w * log_term) + (2.0 / 3.0) * m_inv * log_term
                if abs(mu0 - mu1) > eps:
                    return True
        return False

    def _detect_and_shrink(self) -> bool:
        detected = False
        while self.width >= 10 and self._find_cut():
            self._drop_oldest()
            detected = True
        if detected:
            self.n_detections += 1
        return detected
