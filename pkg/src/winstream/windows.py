"""Sliding-window feature engine.

Four window lengths are calibrated once on a cold-start chunk from the
distribution of games per player (mean, 25th, 50th and 75th percentiles).
For every raw skill and window, six statistics are computed over the most
recent values of a player's history: average, the three quartiles, the
population standard deviation and the maximum modulus of the discrete
Fourier transform.

Quartiles use a rounded-index rule on the sorted window: index
``floor(k*n/4 + 0.5)`` clamped to ``[0, n-1]``.  The same rounding is used
wherever this package takes a percentile of an empirical distribution so
the calibration and the feature statistics share one convention.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .skills import ALL_SKILLS, aggregate_roster

WINDOW_NAMES = ("avg", "q1", "q2", "q3")
STAT_NAMES = ("avg", "q1", "q2", "q3", "std", "fft_max")

# 10 skills x 4 windows x 6 statistics
PRE_GAME_WIDTH = len(ALL_SKILLS) * len(WINDOW_NAMES) * len(STAT_NAMES)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def percentile_index(n: int, fraction: float) -> int:
    """Rounded-index percentile position into a sorted array of length n."""
    return min(n - 1, max(0, round_half_up(fraction * n)))


@dataclass(frozen=True)
class WindowConfig:
    average_window: int
    q1_window: int
    q2_window: int
    q3_window: int

    def __post_init__(self):
        for name in ("average_window", "q1_window", "q2_window", "q3_window"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not (self.q1_window <= self.q2_window <= self.q3_window):
            raise ValueError("quartile windows must be non-decreasing")

    @property
    def lengths(self) -> tuple[int, int, int, int]:
        return (self.average_window, self.q1_window, self.q2_window, self.q3_window)

    @property
    def capacity(self) -> int:
        """Largest window any statistic needs; history rings use this size."""
        return max(self.lengths)


@dataclass(frozen=True)
class WindowStats:
    avg: float
    q1: float
    q2: float
    q3: float
    std: float
    fft_max: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.avg, self.q1, self.q2, self.q3, self.std, self.fft_max)


def compute_window_config(games_per_player: list[int]) -> WindowConfig:
    """Derive the four window lengths from a cold-start game-count distribution.

    Returns (mean, p25, p50, p75) of the counts, the mean rounded half-up
    and everything clamped to at least 1.
    """
    if not games_per_player:
        raise ValueError("cold-start chunk is empty: no games per player")
    counts = sorted(games_per_player)
    n = len(counts)
    mean = sum(counts) / n
    return WindowConfig(
        average_window=max(1, round_half_up(mean)),
        q1_window=max(1, int(counts[percentile_index(n, 0.25)])),
        q2_window=max(1, int(counts[percentile_index(n, 0.50)])),
        q3_window=max(1, int(counts[percentile_index(n, 0.75)])),
    )


class _DftCache:
    """Direct DFT evaluation via cached coefficient matrices.

    Windows hold at most a few dozen values, so an O(n^2) matrix product is
    both exact enough and faster than dispatching to a general FFT.
    """

    def __init__(self):
        self._matrices: dict[int, np.ndarray] = {}

    def matrix(self, n: int) -> np.ndarray:
        m = self._matrices.get(n)
        if m is None:
            j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
            m = np.exp(-2j * np.pi * j * k / n)
            self._matrices[n] = m
        return m

    def max_modulus(self, values: np.ndarray) -> float:
        n = len(values)
        if n == 1:
            return float(abs(values[0]))
        bins = self.matrix(n).T @ values
        return float(np.max(np.abs(bins)))


_DFT = _DftCache()


def window_stats(series, window: int) -> WindowStats:
    """Six statistics over the most recent ``min(window, len(series))`` values.

    The window is clamped to the available history, quartiles follow the
    rounded-index rule on the sorted window, std is the population standard
    deviation, and fft_max is taken over all DFT bins of the raw (unsorted)
    window including the DC bin.
    """
    n_avail = len(series)
    if n_avail == 0:
        raise ValueError("window_stats requires a non-empty series")
    if window < 1:
        raise ValueError("window must be >= 1")
    effective = min(window, n_avail)
    tail = np.asarray(list(series)[-effective:], dtype=float)
    n = effective
    ordered = np.sort(tail)
    avg = float(tail.sum() / n)
    q1 = float(ordered[percentile_index(n, 0.25)])
    q2 = float(ordered[percentile_index(n, 0.50)])
    q3 = float(ordered[percentile_index(n, 0.75)])
    std = float(np.sqrt(np.maximum(0.0, np.mean((tail - avg) ** 2))))
    fft_max = _DFT.max_modulus(tail)
    return WindowStats(avg=avg, q1=q1, q2=q2, q3=q3, std=std, fft_max=fft_max)


class PlayerHistory:
    """Chronological ring of one player's past per-game skill vectors."""

    def __init__(self, player_id, capacity: int):
        self.player_id = player_id
        self.capacity = capacity
        self._dates = deque(maxlen=capacity)
        self._values = {skill: deque(maxlen=capacity) for skill in ALL_SKILLS}
        self.rejected_out_of_order = 0

    def __len__(self) -> int:
        return len(self._dates)

    @property
    def last_date(self):
        return self._dates[-1] if self._dates else None

    def append(self, skill_vector: dict, date) -> bool:
        """Record one game. Returns False (and counts) for out-of-order dates."""
        if self._dates and date < self._dates[-1]:
            self.rejected_out_of_order += 1
            return False
        self._dates.append(date)
        for skill in ALL_SKILLS:
            self._values[skill].append(float(skill_vector.get(skill, 0.0)))
        return True

    def series(self, skill: str):
        return self._values[skill]


def update_history(history: PlayerHistory, skill_vector: dict, date) -> PlayerHistory:
    history.append(skill_vector, date)
    return history


def player_window_block(history: PlayerHistory | None, config: WindowConfig) -> np.ndarray:
    """All 240 window statistics for one player, zeros when no history exists."""
    out = np.zeros(PRE_GAME_WIDTH, dtype=float)
    if history is None or len(history) == 0:
        return out
    i = 0
    for skill in ALL_SKILLS:
        series = history.series(skill)
        for window in config.lengths:
            stats = window_stats(series, window)
            out[i : i + 6] = stats.as_tuple()
            i += 6
    return out


def pre_game_features(team_histories: list[PlayerHistory | None], config: WindowConfig) -> np.ndarray:
    """Team-level pre-game block: per-player window statistics aggregated
    across the five roster members (sum for counts, mean for rates).

    Histories must only contain games strictly before the game being
    described; the stream builder enforces that ordering.
    """
    if len(team_histories) != 5:
        raise ValueError("a team contributes exactly 5 player histories")
    blocks = np.stack([player_window_block(h, config) for h in team_histories])
    out = np.empty(PRE_GAME_WIDTH, dtype=float)
    i = 0
    per_window = len(WINDOW_NAMES) * len(STAT_NAMES)
    for skill in ALL_SKILLS:
        segment = blocks[:, i : i + per_window]
        out[i : i + per_window] = [
            aggregate_roster(list(segment[:, j]), skill) for j in range(per_window)
        ]
        i += per_window
    return out
