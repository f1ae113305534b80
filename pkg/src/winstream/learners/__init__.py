"""Online classifiers sharing one contract: predict with confidence, learn one."""

from __future__ import annotations

from itertools import product

from .adwin import Adwin
from .base import (
    CLASS_LABELS,
    DecisionPath,
    PathStep,
    PathsUnavailable,
    Prediction,
    hoeffding_bound,
    prediction_from_scores,
)
from .forest import AdaptiveRandomForest
from .gnb import GaussianNaiveBayes
from .tree import HoeffdingTree

MODEL_NAMES = ("gnb", "hatc", "arfc")

# Hyperparameter search grids; axis order matches the selected-value triples.
HATC_GRID = {
    "max_depth": (50, 100, 200),
    "tie_threshold": (0.5, 0.05, 0.005),
    "max_size": (50, 100, 200),
}
ARFC_GRID = {
    "n_models": (25, 50, 100),
    "subset_size": (50, 150, 300),
    "lam": (10, 50, 100),
}

# Selected configurations per scenario (scenario B values are the defaults).
HATC_SELECTED = {"A": (50, 0.5, 50), "B": (50, 0.5, 50)}
ARFC_SELECTED = {"A": (100, 50, 10), "B": (50, 50, 10)}


def grid_points(grid: dict) -> list[dict]:
    keys = list(grid)
    return [dict(zip(keys, combo)) for combo in product(*(grid[k] for k in keys))]


def make_learner(model: str, n_features: int, seed: int = 1, **hyper):
    """Build a fresh learner; defaults are the selected scenario-B values."""
    model = model.lower()
    if model == "gnb":
        return GaussianNaiveBayes(n_features=n_features)
    if model == "hatc":
        depth, tie, size = HATC_SELECTED["B"]
        return HoeffdingTree(
            n_features=n_features,
            max_depth=int(hyper.pop("max_depth", depth)),
            tie_threshold=float(hyper.pop("tie_threshold", tie)),
            max_size=int(hyper.pop("max_size", size)),
            adaptive=True,
            **hyper,
        )
    if model == "arfc":
        models, subset, lam = ARFC_SELECTED["B"]
        return AdaptiveRandomForest(
            n_features=n_features,
            n_models=int(hyper.pop("n_models", models)),
            subset_size=int(hyper.pop("subset_size", subset)),
            lam=float(hyper.pop("lam", lam)),
            seed=seed,
            **hyper,
        )
    raise ValueError(f"unknown model '{model}'; expected one of {MODEL_NAMES}")
