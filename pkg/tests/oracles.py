"""Independent brute-force oracles used to freeze expected values.

These deliberately avoid the library code paths they check: quartiles by
explicit sort-and-index, the DFT by a literal O(n^2) double loop, variance
by a two-pass batch formula, and path frequencies by recounting.
"""

from __future__ import annotations

import cmath
import math
from collections import Counter


def oracle_round_half_up(x):
    return int(math.floor(x + 0.5))


def oracle_quartiles(values):
    ordered = sorted(values)
    n = len(ordered)
    out = []
    for k in (1, 2, 3):
        idx = oracle_round_half_up(k * n / 4)
        idx = min(n - 1, max(0, idx))
        out.append(float(ordered[idx]))
    return tuple(out)


def oracle_mean(values):
    return math.fsum(values) / len(values)


def oracle_population_std(values):
    mu = oracle_mean(values)
    return math.sqrt(math.fsum((v - mu) ** 2 for v in values) / len(values))


def oracle_dft_max_modulus(values):
    n = len(values)
    best = 0.0
    for k in range(n):
        acc = 0j
        for j, x in enumerate(values):
            acc += x * cmath.exp(-2j * cmath.pi * j * k / n)
        best = max(best, abs(acc))
    return best


def oracle_window_stats(series, window):
    tail = list(series)[-min(window, len(series)):]
    q1, q2, q3 = oracle_quartiles(tail)
    return {
        "avg": oracle_mean(tail),
        "q1": q1,
        "q2": q2,
        "q3": q3,
        "std": oracle_population_std(tail),
        "fft_max": oracle_dft_max_modulus(tail),
    }


def oracle_batch_variance(values):
    """Two-pass population variance."""
    n = len(values)
    if n == 0:
        return 0.0
    mu = math.fsum(values) / n
    return math.fsum((v - mu) ** 2 for v in values) / n


def oracle_top5_path_features(paths):
    """Recount feature occurrences over a list of paths, each a list of
    feature indices, and return the top-5 (count desc, index asc)."""
    counts = Counter()
    for path in paths:
        counts.update(path)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:5]
