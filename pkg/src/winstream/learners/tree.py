"""Incremental Hoeffding decision tree with optional drift adaptation.

Leaves accumulate per-class Gaussian summaries of each candidate feature;
every ``grace_period`` units of weight a leaf evaluates binary numeric
splits (information gain over thresholds spaced inside the observed range)
and splits when the Hoeffding bound separates the best feature from the
runner-up, or when the bound falls below the tie threshold.

With ``adaptive=True`` every internal node monitors its subtree's 0/1
prediction error with an adaptive-windowing detector; on drift it grows an
alternate subtree in the shadow and swaps it in once the alternate's error
is credibly lower.  Node budgets (``max_size``) count alternates too.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

from .adwin import Adwin
from .base import (
    DecisionPath,
    PathStep,
    Prediction,
    hoeffding_bound,
    prediction_from_scores,
)

_N_CLASSES = 2
_EPS_GAIN = 1e-10


def _entropy(masses: np.ndarray) -> np.ndarray:
    """Binary entropy of rows of class-mass vectors (bits); zero-safe."""
    totals = masses.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(totals > 0, masses / np.maximum(totals, 1e-300), 0.0)
        logs = np.where(p > 0, np.log2(np.maximum(p, 1e-300)), 0.0)
    return -(p * logs).sum(axis=-1)


class _Node:
    __slots__ = (
        "feature", "threshold", "left", "right", "parent", "branch",
        "depth", "counts", "stat_n", "mean", "m2", "fmin", "fmax",
        "weight_since_attempt", "adwin", "alternate", "alt_adwin",
        "mc_errors", "nb_errors",
    )

    def __init__(self, n_sub: int, depth: int, parent=None, branch=None):
        self.feature = -1  # -1 marks a leaf
        self.threshold = 0.0
        self.left = None
        self.right = None
        self.parent = parent
        self.branch = branch  # 0 = left, 1 = right at the parent
        self.depth = depth
        self.counts = np.zeros(_N_CLASSES)
        self.stat_n = np.zeros(_N_CLASSES)
        self.mean = np.zeros((_N_CLASSES, n_sub))
        self.m2 = np.zeros((_N_CLASSES, n_sub))
        self.fmin = np.full(n_sub, np.inf)
        self.fmax = np.full(n_sub, -np.inf)
        self.weight_since_attempt = 0.0
        self.adwin = None
        self.alternate = None
        self.alt_adwin = None
        self.mc_errors = 0.0
        self.nb_errors = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0

    def majority_scores(self) -> np.ndarray:
        return (self.counts + 1.0) / (self.counts.sum() + _N_CLASSES)

    def bayes_scores(self, x_sub: np.ndarray) -> np.ndarray:
        """Naive-Bayes score from the leaf's own Gaussian split summaries."""
        total = self.counts.sum()
        if total <= 0 or np.count_nonzero(self.counts) < 2 or self.mean.shape[1] == 0:
            return self.majority_scores()
        var = self.m2 / np.maximum(self.stat_n, 1.0)[:, None]
        var = var + 1e-9 * max(float(var.max(initial=0.0)), 1.0)
        log_scores = np.log(self.counts / total)
        log_scores = log_scores - 0.5 * (
            np.log(2.0 * np.pi * var) + (x_sub[None, :] - self.mean) ** 2 / var
        ).sum(axis=1)
        shifted = np.exp(log_scores - log_scores.max())
        return shifted / shifted.sum()

    def leaf_scores(self, x_sub: np.ndarray | None = None, use_bayes: bool = False) -> np.ndarray:
        if use_bayes and x_sub is not None and self.nb_errors <= self.mc_errors:
            return self.bayes_scores(x_sub)
        return self.majority_scores()

    def leaf_label(self, x_sub: np.ndarray | None = None, use_bayes: bool = False) -> int:
        scores = self.leaf_scores(x_sub, use_bayes)
        return 0 if scores[0] >= scores[1] else 1

    def subtree_size(self) -> int:
        n = 1
        if not self.is_leaf:
            n += self.left.subtree_size() + self.right.subtree_size()
        if self.alternate is not None:
            n += self.alternate.subtree_size()
        return n


class HoeffdingTree:
    def __init__(
        self,
        n_features: int,
        feature_indices=None,
        max_depth: int = 50,
        tie_threshold: float = 0.5,
        max_size: int = 50,
        grace_period: float = 150.0,
        split_confidence: float = 1e-7,
        n_split_points: int = 8,
        adaptive: bool = True,
        leaf_prediction: str = "nba",
        drift_delta: float = 0.002,
        swap_confidence: float = 0.05,
        min_swap_observations: int = 60,
    ):
        if max_depth < 1 or max_size < 1 or grace_period <= 0:
            raise ValueError("tree hyperparameters must be positive")
        if tie_threshold <= 0 or not (0 < split_confidence < 1):
            raise ValueError("tie threshold and split confidence must be positive")
        self.n_features = n_features
        if feature_indices is None:
            feature_indices = np.arange(n_features)
        self.feature_indices = np.asarray(feature_indices, dtype=int)
        self._global_to_sub = {int(g): i for i, g in enumerate(self.feature_indices)}
        self.max_depth = max_depth
        self.tie_threshold = tie_threshold
        self.max_size = max_size
        self.grace_period = grace_period
        self.split_confidence = split_confidence
        self.n_split_points = n_split_points
        self.adaptive = adaptive
        if leaf_prediction not in ("nba", "mc"):
            raise ValueError("leaf_prediction must be 'nba' or 'mc'")
        self.leaf_prediction = leaf_prediction
        self.drift_delta = drift_delta
        self.swap_confidence = swap_confidence
        self.min_swap_observations = min_swap_observations
        self._steps = np.arange(1, n_split_points + 1) / (n_split_points + 1)
        self.root = _Node(len(self.feature_indices), depth=0)
        self.node_count = 1
        self.n_swaps = 0
        self.weight_seen = 0.0

    # ------------------------------------------------------------------ paths

    def _route(self, node: _Node, x: np.ndarray) -> list[_Node]:
        path = [node]
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.threshold else node.right
            path.append(node)
        return path

    def _x_sub(self, x: np.ndarray) -> np.ndarray:
        return x[self.feature_indices]

    def predict(self, x: np.ndarray) -> Prediction:
        x = np.asarray(x, dtype=float)
        leaf = self._route(self.root, x)[-1]
        scores = leaf.leaf_scores(self._x_sub(x), self.leaf_prediction == "nba")
        return prediction_from_scores(scores)

    def decision_paths(self, x: np.ndarray) -> list[DecisionPath]:
        x = np.asarray(x, dtype=float)
        path = self._route(self.root, x)
        steps = []
        for node in path[:-1]:
            goes_left = x[node.feature] <= node.threshold
            steps.append(PathStep(feature=int(node.feature), threshold=float(node.threshold),
                                  branch="<=" if goes_left else ">"))
        leaf = path[-1]
        use_bayes = self.leaf_prediction == "nba"
        scores = leaf.leaf_scores(self._x_sub(x), use_bayes)
        label = 0 if scores[0] >= scores[1] else 1
        return [DecisionPath(steps=tuple(steps), leaf_label=label,
                             leaf_scores=(float(scores[0]), float(scores[1])))]

    # ------------------------------------------------------------------ learn

    def learn_one(self, x: np.ndarray, y: int, weight: float = 1.0) -> None:
        x = np.asarray(x, dtype=float)
        self.weight_seen += weight
        if self.adaptive:
            self._learn_adaptive(x, y, weight)
        else:
            self._learn_subtree(self.root, x, y, weight, is_alternate=False)

    def _learn_adaptive(self, x: np.ndarray, y: int, weight: float) -> None:
        path = self._route(self.root, x)
        x_sub = self._x_sub(x)
        use_bayes = self.leaf_prediction == "nba"
        error = int(path[-1].leaf_label(x_sub, use_bayes) != y)
        # Drift monitors on every internal node of the visited path; the
        # subtree rooted at each of them produced the same leaf prediction.
        for node in path[:-1]:
            if node.adwin is None:
                node.adwin = Adwin(delta=self.drift_delta)
            drifted = node.adwin.update(error)
            if drifted and node.alternate is None and self._budget_allows(1):
                node.alternate = _Node(len(self.feature_indices), depth=node.depth)
                node.alt_adwin = Adwin(delta=self.drift_delta)
                self.node_count += 1
        self._learn_subtree(self.root, x, y, weight, is_alternate=False)
        # Shadow-train alternates under visited nodes and consider swapping.
        # A swap detaches every deeper node on this path, so stop after one.
        for node in path[:-1]:
            if node.alternate is None:
                continue
            alt_leaf = self._route(node.alternate, x)[-1]
            node.alt_adwin.update(int(alt_leaf.leaf_label(x_sub, use_bayes) != y))
            self._learn_subtree(node.alternate, x, y, weight, is_alternate=True)
            if self._maybe_swap(node):
                break

    def _maybe_swap(self, node: _Node) -> bool:
        """Returns True when the tree structure changed (swap or prune)."""
        main, alt = node.adwin, node.alt_adwin
        if main is None or alt is None:
            return False
        if alt.width < self.min_swap_observations or main.width < self.min_swap_observations:
            return False
        margin = math.sqrt(
            0.5 * (1.0 / main.width + 1.0 / alt.width) * math.log(1.0 / self.swap_confidence)
        )
        if alt.estimation + margin < main.estimation:
            self._replace_with_alternate(node)
            return True
        if main.estimation + margin < alt.estimation:
            self.node_count -= node.alternate.subtree_size()
            node.alternate = None
            node.alt_adwin = None
            return True
        return False

    def _replace_with_alternate(self, node: _Node) -> None:
        alternate = node.alternate
        node.alternate = None
        node.alt_adwin = None
        self.node_count -= node.subtree_size() - alternate.subtree_size()
        alternate.parent = node.parent
        alternate.branch = node.branch
        self._shift_depth(alternate, node.depth - alternate.depth)
        if node.parent is None:
            self.root = alternate
        elif node.branch == 0:
            node.parent.left = alternate
        else:
            node.parent.right = alternate
        self.n_swaps += 1

    def _shift_depth(self, node: _Node, delta: int) -> None:
        if delta == 0:
            return
        node.depth += delta
        if not node.is_leaf:
            self._shift_depth(node.left, delta)
            self._shift_depth(node.right, delta)
        if node.alternate is not None:
            self._shift_depth(node.alternate, delta)

    def _learn_subtree(self, subroot: _Node, x: np.ndarray, y: int, weight: float,
                       is_alternate: bool) -> None:
        leaf = self._route(subroot, x)[-1]
        self._update_leaf(leaf, x, y, weight)
        if leaf.weight_since_attempt >= self.grace_period:
            leaf.weight_since_attempt = 0.0
            self._attempt_split(leaf)

    def _update_leaf(self, leaf: _Node, x: np.ndarray, y: int, weight: float) -> None:
        x_sub = x[self.feature_indices]
        if self.leaf_prediction == "nba":
            # score both leaf strategies on this sample before absorbing it
            mc = leaf.majority_scores()
            nb = leaf.bayes_scores(x_sub)
            leaf.mc_errors += weight * ((0 if mc[0] >= mc[1] else 1) != y)
            leaf.nb_errors += weight * ((0 if nb[0] >= nb[1] else 1) != y)
        leaf.counts[y] += weight
        leaf.stat_n[y] += weight
        n = leaf.stat_n[y]
        delta = x_sub - leaf.mean[y]
        leaf.mean[y] += (weight / n) * delta
        leaf.m2[y] += weight * delta * (x_sub - leaf.mean[y])
        np.minimum(leaf.fmin, x_sub, out=leaf.fmin)
        np.maximum(leaf.fmax, x_sub, out=leaf.fmax)
        leaf.weight_since_attempt += weight

    def _budget_allows(self, extra: int) -> bool:
        return self.node_count + extra <= self.max_size

    def _attempt_split(self, leaf: _Node) -> None:
        if leaf.depth >= self.max_depth or not self._budget_allows(2):
            return
        total = leaf.counts.sum()
        if total <= 0 or np.count_nonzero(leaf.counts) < 2:
            return
        gains, thresholds = self._split_gains(leaf)
        if gains is None:
            return
        best_per_feature = gains.max(axis=1)
        order = np.argsort(best_per_feature)[::-1]
        g1 = best_per_feature[order[0]]
        g2 = best_per_feature[order[1]] if len(order) > 1 else 0.0
        eps = hoeffding_bound(1.0, self.split_confidence, total)
        if g1 <= _EPS_GAIN:
            return
        if (g1 - g2 > eps) or (eps < self.tie_threshold):
            f_sub = int(order[0])
            t_idx = int(np.argmax(gains[f_sub]))
            self._split_leaf(leaf, f_sub, float(thresholds[f_sub, t_idx]))

    def _split_gains(self, leaf: _Node):
        """Information gain of every (feature, threshold) candidate.

        Class-conditional feature distributions are approximated as
        Gaussians from the leaf's running moments; thresholds are spaced
        strictly inside the observed [min, max] of each feature.
        """
        span = leaf.fmax - leaf.fmin
        usable = span > 0
        if not usable.any():
            return None, None
        thresholds = leaf.fmin[:, None] + span[:, None] * self._steps[None, :]
        counts = leaf.counts
        var = leaf.m2 / np.maximum(leaf.stat_n, 1.0)[:, None]
        sd = np.sqrt(var) + 1e-9 * np.maximum(span, 1.0)[None, :] + 1e-12
        # left mass per (class, feature, threshold)
        z = (thresholds[None, :, :] - leaf.mean[:, :, None]) / sd[:, :, None]
        left = counts[:, None, None] * ndtr(z)
        left[counts == 0] = 0.0
        right = counts[:, None, None] - left
        total = counts.sum()
        h_parent = _entropy(counts[None, :])[0]
        left_cf = np.moveaxis(left, 0, -1)   # (feature, threshold, class)
        right_cf = np.moveaxis(right, 0, -1)
        lw = left_cf.sum(axis=-1)
        rw = right_cf.sum(axis=-1)
        h_children = (lw * _entropy(left_cf) + rw * _entropy(right_cf)) / total
        gains = h_parent - h_children
        gains[~usable, :] = 0.0
        return np.maximum(gains, 0.0), thresholds

    def _split_leaf(self, leaf: _Node, f_sub: int, threshold: float) -> None:
        leaf.feature = int(self.feature_indices[f_sub])
        leaf.threshold = threshold
        n_sub = len(self.feature_indices)
        leaf.left = _Node(n_sub, depth=leaf.depth + 1, parent=leaf, branch=0)
        leaf.right = _Node(n_sub, depth=leaf.depth + 1, parent=leaf, branch=1)
        self.node_count += 2
        # release leaf summaries; the node keeps only its class counts
        leaf.stat_n = np.zeros(_N_CLASSES)
        leaf.mean = np.zeros((_N_CLASSES, 0))
        leaf.m2 = np.zeros((_N_CLASSES, 0))
        leaf.fmin = np.zeros(0)
        leaf.fmax = np.zeros(0)

    # ------------------------------------------------------------------ info

    def max_reached_depth(self) -> int:
        def walk(node):
            depths = [node.depth]
            if not node.is_leaf:
                depths += [walk(node.left), walk(node.right)]
            if node.alternate is not None:
                depths.append(walk(node.alternate))
            return max(depths)

        return walk(self.root)

    def counted_nodes(self) -> int:
        return self.root.subtree_size()
