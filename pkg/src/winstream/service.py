"""HTTP service: replay sessions, prediction feed, explanations, ratings.

One background thread per session advances the prequential runner at the
configured replay speed (or step-by-step when paused); every kept sample
produces a prediction record and a path-based explanation computed against
the pre-update model state.  Read endpoints serve immutable copies and
never touch learner state; rating writes serialise through the store lock.
"""

from __future__ import annotations

import json
import queue
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from .config import AppConfig
from .evaluation import SCENARIOS, PrequentialRunner, compute_metrics, make_selector
from .explain import RatingError, RatingStore, explain, render_description
from .ingest import filter_by_date, load_matches, load_players, recover_cutoff
from .learners import make_learner
from .snapshot import SnapshotError, load_snapshot, save_snapshot
from .stream import FusedStreamBuilder


@dataclass
class SessionRecord:
    kept_index: int
    stream_index: int
    game: dict
    prediction: dict
    skills_panel: dict
    explanation_id: str
    n_active_features: int


class StreamSession:
    def __init__(self, session_id: str, builder: FusedStreamBuilder, config: AppConfig,
                 rating_store: RatingStore, max_games: int | None = None):
        self.id = session_id
        self.builder = builder
        self.config = config
        self.rating_store = rating_store
        self.max_games = max_games
        self.scenario = SCENARIOS[config.scenario]
        self.lock = threading.RLock()
        self.paused = True
        self.finished = False
        self.records: list[SessionRecord] = []
        self.explanations: dict[str, dict] = {}
        self.subscribers: list[queue.Queue] = []
        self._thread: threading.Thread | None = None
        self._stop = threading.Event()
        self._build_runner()

    # ------------------------------------------------------------- internals

    def _build_runner(self, position: int | None = None, histories: dict | None = None,
                      learner=None, selector=None):
        self.cursor = self.builder.cursor(position, histories)
        n_features = len(self.scenario.feature_indices(self.builder.manifest))
        self.learner = learner or make_learner(
            self.config.model, n_features=n_features, seed=self.config.seed,
            **self.config.hyperparameters)
        self.selector = selector or make_selector(
            self.builder.chunk_matrix, self.scenario, self.builder.manifest)
        self.runner = PrequentialRunner(
            self.cursor.samples(), self.learner, self.selector, self.scenario,
            self.builder.manifest, decimation=self.config.decimation,
            phase=self.config.phase, observer=self._observe)

    def _observe(self, sample, masked, prediction, entry):
        perf = None
        if self.runner.log[:-1]:
            m = compute_metrics(self.runner.log[:-1])
            perf = {"accuracy": m.accuracy, "n_evaluated": m.n_evaluated, "macro_f": m.macro_f}
        explanation_id = f"{self.id}:{len(self.records)}"
        exp = explain(
            self.learner, masked, prediction, game_key=sample.key,
            estimator_budget=self.config.estimator_budget,
            performance=perf, explanation_id=explanation_id,
        )
        description = render_description(exp, self.builder.manifest)
        self.rating_store.register_explanation(explanation_id)
        record = SessionRecord(
            kept_index=len(self.records),
            stream_index=sample.index,
            game=self.builder.game_meta(sample.index),
            prediction={
                "label": prediction.label,
                "winner": prediction.label_name,
                "confidence": prediction.confidence,
                "scores": list(prediction.scores),
                "true_label": sample.label,
            },
            skills_panel=self.cursor.team_recent_skill_panel(sample.index),
            explanation_id=explanation_id,
            n_active_features=entry.n_active,
        )
        paths = [
            {
                "estimator": i,
                "steps": [
                    {
                        "feature": step.feature,
                        "name": self.builder.manifest[step.feature].name,
                        "phrase": self.builder.manifest[step.feature].phrase,
                        "threshold": step.threshold,
                        "branch": step.branch,
                    }
                    for step in path.steps
                ],
                "leaf_label": path.leaf_label,
                "leaf_scores": list(path.leaf_scores),
            }
            for i, path in enumerate(exp.agreeing_paths)
        ]
        self.explanations[explanation_id] = {
            "explanation_id": explanation_id,
            "game_key": list(sample.key),
            "prediction": record.prediction,
            "top_features": [
                {
                    "feature": f,
                    "count": c,
                    "name": self.builder.manifest[f].name,
                    "phrase": self.builder.manifest[f].phrase,
                }
                for f, c in exp.top_features
            ],
            "description": description,
            "n_agreeing_paths": len(paths),
            "paths": paths,
            "no_paths_reason": exp.no_paths_reason,
            "performance": perf,
        }
        self.records.append(record)
        payload = self._record_json(record)
        for q in list(self.subscribers):
            try:
                q.put_nowait(payload)
            except queue.Full:
                pass

    def _record_json(self, record: SessionRecord) -> dict:
        return {
            "kept_index": record.kept_index,
            "stream_index": record.stream_index,
            "game": record.game,
            "prediction": record.prediction,
            "skills_panel": record.skills_panel,
            "explanation_id": record.explanation_id,
            "n_active_features": record.n_active_features,
        }

    # ------------------------------------------------------------ lifecycle

    def step(self, n: int = 1) -> int:
        """Advance exactly n kept samples; returns how many were processed."""
        done = 0
        with self.lock:
            for _ in range(n):
                if self.max_games is not None and len(self.records) >= self.max_games:
                    self.finished = True
                    break
                if self.runner.step() is None:
                    self.finished = True
                    break
                done += 1
        return done

    def _loop(self):
        while not self._stop.is_set() and not self.finished:
            if self.paused:
                time.sleep(0.02)
                continue
            advanced = self.step(1)
            if advanced == 0:
                break
            if self.config.replay_speed > 0:
                time.sleep(1.0 / self.config.replay_speed)

    def resume(self):
        with self.lock:
            self.paused = False
            if self._thread is None or not self._thread.is_alive():
                self._thread = threading.Thread(target=self._loop, daemon=True)
                self._thread.start()

    def pause(self):
        self.paused = True

    def stop(self):
        self.paused = True
        self._stop.set()

    # ------------------------------------------------------------- snapshot

    def snapshot(self, path: str | Path) -> Path:
        if not self.paused:
            raise SnapshotError("pause the session before taking a snapshot")
        with self.lock:
            payload = {
                "kind": "winstream-session",
                "config": self.config.__dict__,
                "cursor": self.cursor.snapshot_state(),
                "learner": self.learner,
                "selector": self.selector,
                "runner_position": self.runner._position,
                "runner_log": self.runner.log,
                "runner_wall_clock": self.runner.wall_clock,
                "records": self.records,
                "explanations": self.explanations,
            }
            return save_snapshot(payload, path)

    def restore(self, path: str | Path) -> None:
        payload = load_snapshot(path)
        if not isinstance(payload, dict) or payload.get("kind") != "winstream-session":
            raise SnapshotError("snapshot does not contain a session")
        with self.lock:
            self.paused = True
            state = payload["cursor"]
            self._build_runner(
                position=state["position"], histories=state["histories"],
                learner=payload["learner"], selector=payload["selector"],
            )
            self.runner._position = payload["runner_position"]
            self.runner.log = payload["runner_log"]
            self.runner.wall_clock = payload["runner_wall_clock"]
            self.records = payload["records"]
            self.explanations = payload["explanations"]
            for eid in self.explanations:
                self.rating_store.register_explanation(eid)
            self.finished = False

    # ----------------------------------------------------------------- views

    def info(self) -> dict:
        with self.lock:
            metrics = compute_metrics(self.runner.log, self.runner.wall_clock).to_dict() \
                if self.runner.log else None
            return {
                "session_id": self.id,
                "scenario": self.config.scenario,
                "model": self.config.model,
                "seed": self.config.seed,
                "paused": self.paused,
                "finished": self.finished,
                "position": self.cursor.position,
                "n_predictions": len(self.records),
                "replay_speed": self.config.replay_speed,
                "metrics": metrics,
            }


class CreateSessionBody(BaseModel):
    scenario: str | None = None
    model: str | None = None
    seed: int | None = None
    replay_speed: float | None = None
    max_games: int | None = None
    estimator_budget: int | None = None


class RatingBody(BaseModel):
    explanation_id: str
    verdict: str
    likert: int | None = None
    rater_id: str = "anonymous"


class SnapshotBody(BaseModel):
    path: str


def build_pipeline(config: AppConfig, target_matches: int | None = None) -> FusedStreamBuilder:
    players = load_players(config.players_path)
    matches = load_matches(config.results_path)
    if target_matches:
        cutoff = recover_cutoff(matches, target_matches)
        matches = filter_by_date(matches, cutoff).retained
        players = filter_by_date(players, cutoff).retained
    return FusedStreamBuilder(
        matches, players, cold_start_fraction=config.cold_start_fraction
    ).prepare()


def create_app(config: AppConfig, builder: FusedStreamBuilder | None = None,
               target_matches: int | None = None) -> FastAPI:
    app = FastAPI(title="winstream", version="1.0")
    state = {
        "builder": builder or build_pipeline(config, target_matches),
        "sessions": {},
        "ratings": RatingStore(config.ratings_path or None),
    }
    app.state.winstream = state

    def get_session(session_id: str) -> StreamSession:
        session = state["sessions"].get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    @app.get("/api/v1/manifest")
    def manifest():
        doc = state["builder"].manifest.to_document()
        doc["window_config"] = list(state["builder"].window_config.lengths)
        return doc

    @app.post("/api/v1/sessions")
    def create_session(body: CreateSessionBody):
        import dataclasses

        overrides = {k: v for k, v in body.model_dump().items()
                     if k in ("scenario", "model", "seed", "replay_speed") and v is not None}
        session_config = dataclasses.replace(config, **overrides).validate()
        if body.estimator_budget is not None:
            session_config.estimator_budget = body.estimator_budget
        session_id = uuid.uuid4().hex[:12]
        session = StreamSession(session_id, state["builder"], session_config,
                                state["ratings"], max_games=body.max_games)
        state["sessions"][session_id] = session
        return session.info()

    @app.get("/api/v1/sessions/{session_id}")
    def session_info(session_id: str):
        return get_session(session_id).info()

    @app.delete("/api/v1/sessions/{session_id}")
    def delete_session(session_id: str):
        session = get_session(session_id)
        session.stop()
        del state["sessions"][session_id]
        return {"deleted": session_id}

    @app.post("/api/v1/sessions/{session_id}/resume")
    def resume(session_id: str):
        session = get_session(session_id)
        session.resume()
        return session.info()

    @app.post("/api/v1/sessions/{session_id}/pause")
    def pause(session_id: str):
        session = get_session(session_id)
        session.pause()
        return session.info()

    @app.post("/api/v1/sessions/{session_id}/step")
    def step(session_id: str, n: int = 1):
        session = get_session(session_id)
        if n < 1:
            raise HTTPException(status_code=422, detail="n must be >= 1")
        advanced = session.step(n)
        return {"advanced": advanced, **session.info()}

    @app.get("/api/v1/sessions/{session_id}/predictions")
    def predictions(session_id: str, since: int = 0, limit: int = 200):
        session = get_session(session_id)
        with session.lock:
            chunk = session.records[since : since + limit]
            return {
                "total": len(session.records),
                "items": [session._record_json(r) for r in chunk],
            }

    @app.get("/api/v1/sessions/{session_id}/stream")
    def stream(session_id: str):
        session = get_session(session_id)
        subscriber: queue.Queue = queue.Queue(maxsize=1000)
        session.subscribers.append(subscriber)

        def event_source():
            try:
                while True:
                    try:
                        item = subscriber.get(timeout=15.0)
                        yield f"data: {json.dumps(item)}\n\n"
                    except queue.Empty:
                        yield ": heartbeat\n\n"
                        if session.finished:
                            break
            finally:
                if subscriber in session.subscribers:
                    session.subscribers.remove(subscriber)

        return StreamingResponse(event_source(), media_type="text/event-stream")

    @app.get("/api/v1/sessions/{session_id}/explanations/{explanation_id}")
    def explanation(session_id: str, explanation_id: str):
        session = get_session(session_id)
        exp = session.explanations.get(explanation_id)
        if exp is None:
            raise HTTPException(status_code=404, detail="unknown explanation")
        return {k: v for k, v in exp.items() if k != "paths"}

    @app.get("/api/v1/sessions/{session_id}/paths/{explanation_id}")
    def paths(session_id: str, explanation_id: str, estimator: int = 0):
        session = get_session(session_id)
        exp = session.explanations.get(explanation_id)
        if exp is None:
            raise HTTPException(status_code=404, detail="unknown explanation")
        n = exp["n_agreeing_paths"]
        if n == 0:
            return {"n_agreeing_paths": 0, "estimator": None, "path": None,
                    "no_paths_reason": exp["no_paths_reason"]}
        if not 0 <= estimator < n:
            raise HTTPException(status_code=422,
                                detail=f"estimator index out of bounds [0, {n})")
        return {
            "n_agreeing_paths": n,
            "estimator": estimator,
            "path": exp["paths"][estimator],
            "emphasised_features": [t["feature"] for t in exp["top_features"]],
        }

    @app.get("/api/v1/sessions/{session_id}/metrics")
    def metrics(session_id: str):
        session = get_session(session_id)
        with session.lock:
            if not session.runner.log:
                return {"n_evaluated": 0}
            return compute_metrics(session.runner.log, session.runner.wall_clock).to_dict()

    @app.post("/api/v1/ratings")
    def post_rating(body: RatingBody):
        try:
            rating = state["ratings"].record_rating(
                body.explanation_id, body.verdict, body.likert, body.rater_id)
        except RatingError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return rating.to_json()

    @app.get("/api/v1/ratings/aggregate")
    def rating_aggregate():
        return state["ratings"].aggregates()

    @app.get("/api/v1/ratings/{explanation_id}")
    def ratings_for(explanation_id: str):
        return {"items": [r.to_json() for r in state["ratings"].ratings_for(explanation_id)]}

    @app.post("/api/v1/sessions/{session_id}/snapshot")
    def snapshot(session_id: str, body: SnapshotBody):
        session = get_session(session_id)
        try:
            out = session.snapshot(body.path)
        except SnapshotError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {"path": str(out)}

    @app.post("/api/v1/sessions/{session_id}/restore")
    def restore(session_id: str, body: SnapshotBody):
        session = get_session(session_id)
        try:
            session.restore(body.path)
        except SnapshotError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return session.info()

    return app


def serve(config: AppConfig, target_matches: int | None = None):
    """Run the service until interrupted."""
    import uvicorn

    app = create_app(config, target_matches=target_matches)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
