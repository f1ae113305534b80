"""Runtime configuration: one JSON file plus environment overrides.

Environment variables prefixed ``WINSTREAM_`` override file values, e.g.
``WINSTREAM_PORT=9000`` or ``WINSTREAM_SCENARIO=A``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path


@dataclass
class AppConfig:
    players_path: str = ""
    results_path: str = ""
    port: int = 8000
    host: str = "127.0.0.1"
    seed: int = 1
    scenario: str = "B"
    model: str = "arfc"
    decimation: int = 10
    phase: int = 0
    block_size: int = 10_000
    cold_start_fraction: float = 0.10
    replay_speed: float = 0.0  # samples per second; 0 means as fast as possible
    estimator_budget: int | None = None
    ratings_path: str = ""
    hyperparameters: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | Path | None = None, env: dict | None = None) -> "AppConfig":
        values: dict = {}
        if path:
            values.update(json.loads(Path(path).read_text()))
        env = os.environ if env is None else env
        for f in fields(cls):
            key = f"WINSTREAM_{f.name.upper()}"
            if key in env:
                raw = env[key]
                if f.type in ("int", "int | None"):
                    values[f.name] = int(raw)
                elif f.type == "float":
                    values[f.name] = float(raw)
                elif f.type == "dict":
                    values[f.name] = json.loads(raw)
                else:
                    values[f.name] = raw
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown configuration keys: {sorted(unknown)}")
        return cls(**values)

    def validate(self) -> "AppConfig":
        if self.scenario not in ("A", "B"):
            raise ValueError("scenario must be A or B")
        if self.model not in ("gnb", "hatc", "arfc"):
            raise ValueError("model must be one of gnb, hatc, arfc")
        if self.decimation < 1 or not 0 <= self.phase < self.decimation:
            raise ValueError("invalid decimation/phase")
        if not 0 < self.cold_start_fraction < 1:
            raise ValueError("cold-start fraction must be in (0, 1)")
        return self
