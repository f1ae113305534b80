"""Decision-path explanations, natural-language rendering and ratings.

Paths are traversed over the exact model snapshot that produced a
prediction; trees disagreeing with the majority vote are dropped, feature
occurrences along the surviving paths are counted and the five most
frequent become the explanation's anchors.  Rendering is a deterministic
template so explanations are regression-testable; ratings append to a
line-delimited store with the latest verdict per explanation flagged
current.
"""

from __future__ import annotations

import datetime as dt
import json
import threading
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .learners import PathsUnavailable, Prediction
from .manifest import FeatureManifest


@dataclass(frozen=True)
class Explanation:
    explanation_id: str
    game_key: tuple
    prediction: Prediction
    top_features: tuple  # ((feature_index, count), ...) at most five
    agreeing_paths: tuple  # DecisionPath objects matching the majority label
    n_estimators_considered: int
    no_paths_reason: str | None = None
    description: str = ""
    performance: dict | None = None

    def with_description(self, text: str) -> "Explanation":
        from dataclasses import replace

        return replace(self, description=text)


def explain(model, x, prediction: Prediction, game_key: tuple,
            estimator_budget: int | None = None, performance: dict | None = None,
            explanation_id: str | None = None) -> Explanation:
    """Collect agreeing decision paths and rank features by path frequency."""
    eid = explanation_id or f"{'/'.join(map(str, game_key))}"
    try:
        paths = model.decision_paths(x)
    except PathsUnavailable as exc:
        return Explanation(
            explanation_id=eid, game_key=game_key, prediction=prediction,
            top_features=(), agreeing_paths=(), n_estimators_considered=0,
            no_paths_reason=str(exc), performance=performance,
        )
    considered = paths if estimator_budget is None else paths[:estimator_budget]
    agreeing = tuple(p for p in considered if p.leaf_label == prediction.label)
    counts = Counter()
    for path in agreeing:
        counts.update(path.feature_sequence)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:5]
    return Explanation(
        explanation_id=eid, game_key=game_key, prediction=prediction,
        top_features=tuple(ranked), agreeing_paths=agreeing,
        n_estimators_considered=len(considered), performance=performance,
    )


def render_description(explanation: Explanation, manifest: FeatureManifest,
                       window_context: dict | None = None) -> str:
    """Deterministic natural-language rendering of an explanation.

    Top features appear in emphasis markers (double asterisks) so the
    dashboard can bold exactly the spans the explanation relies on.
    """
    pred = explanation.prediction
    lines = [
        f"Predicted winner: {pred.label_name} with {pred.confidence * 100.0:.1f}% confidence."
    ]
    if explanation.no_paths_reason:
        lines.append(
            "No decision paths are available for this model; "
            "the prediction is reported without path-based evidence."
        )
    elif not explanation.top_features:
        lines.append("The decision required no feature comparisons (single-leaf model).")
    else:
        parts = []
        for feature_index, count in explanation.top_features:
            entry = manifest[feature_index]
            noun = "check" if count == 1 else "checks"
            parts.append(f"**{entry.phrase}** ({count} {noun})")
        lines.append(
            "The decision relied most on: " + "; ".join(parts) + "."
        )
        for feature_index, _ in explanation.top_features:
            entry = manifest[feature_index]
            if entry.group == "pre_game" and window_context and entry.name in window_context:
                lines.append(
                    f"Current value of {entry.phrase}: {window_context[entry.name]:+.3f}."
                )
    perf = explanation.performance or {}
    if perf:
        lines.append(
            "Model performance so far: accuracy {acc:.1f}% over {n} evaluated games "
            "(macro F-measure {f:.1f}%).".format(
                acc=perf.get("accuracy", 0.0) * 100.0,
                n=perf.get("n_evaluated", 0),
                f=perf.get("macro_f", 0.0) * 100.0,
            )
        )
    return "\n".join(lines)


class RatingError(ValueError):
    pass


@dataclass
class ExplanationRating:
    explanation_id: str
    verdict: str  # "rejected" | "accepted"
    likert: int | None
    rater_id: str
    timestamp: str
    current: bool = True

    def to_json(self) -> dict:
        return {
            "explanation_id": self.explanation_id,
            "verdict": self.verdict,
            "likert": self.likert,
            "rater_id": self.rater_id,
            "timestamp": self.timestamp,
            "current": self.current,
        }


class RatingStore:
    """Append-only rating log; multiple ratings per explanation are kept
    with the latest flagged current."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self._lock = threading.Lock()
        self._by_explanation: dict[str, list[ExplanationRating]] = {}
        self._known_explanations: set[str] = set()

    def register_explanation(self, explanation_id: str) -> None:
        with self._lock:
            self._known_explanations.add(explanation_id)

    def record_rating(self, explanation_id: str, verdict: str, likert: int | None = None,
                      rater_id: str = "anonymous") -> ExplanationRating:
        if explanation_id not in self._known_explanations:
            raise RatingError(f"unknown explanation id: {explanation_id}")
        if verdict not in ("accepted", "rejected"):
            raise RatingError("verdict must be 'accepted' or 'rejected'")
        if verdict == "accepted":
            if likert is None or not 1 <= int(likert) <= 5:
                raise RatingError("accepted ratings carry a Likert score in 1..5")
            likert = int(likert)
        else:
            if likert is not None:
                raise RatingError("rejected ratings carry no Likert score")
        rating = ExplanationRating(
            explanation_id=explanation_id,
            verdict=verdict,
            likert=likert,
            rater_id=rater_id,
            timestamp=dt.datetime.now(dt.timezone.utc).isoformat(),
        )
        with self._lock:
            history = self._by_explanation.setdefault(explanation_id, [])
            for earlier in history:
                earlier.current = False
            history.append(rating)
            if self.path:
                with open(self.path, "a") as sink:
                    sink.write(json.dumps(rating.to_json()) + "\n")
        return rating

    def ratings_for(self, explanation_id: str) -> list[ExplanationRating]:
        with self._lock:
            return list(self._by_explanation.get(explanation_id, []))

    def aggregates(self) -> dict:
        with self._lock:
            current = [h[-1] for h in self._by_explanation.values() if h]
            accepted = [r for r in current if r.verdict == "accepted"]
            total = len(current)
            return {
                "n_rated": total,
                "n_accepted": len(accepted),
                "n_rejected": total - len(accepted),
                "acceptance_rate": len(accepted) / total if total else 0.0,
                "mean_likert": (
                    sum(r.likert for r in accepted) / len(accepted) if accepted else None
                ),
            }
