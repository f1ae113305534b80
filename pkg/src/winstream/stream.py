"""Fused sample stream: join, in-game features, windows and calibration.

The builder makes one vectorised pass to join every game with its ten
player rows and precompute the 39 in-game features, then replays the
cold-start chunk to calibrate the window configuration, the map vocabulary
and the selector threshold.  After the chunk, samples stream lazily: the
240 pre-game window statistics are only materialised for samples the
consumer actually keeps, but player histories advance on every game so no
information is skipped.

Fusion here must agree with the record-level reference in
:mod:`winstream.fusion`; a test drives both paths over the same fixture.
"""

from __future__ import annotations

import datetime as dt
from collections import deque
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .fusion import FusedSample
from .manifest import (
    IN_GAME_WIDTH,
    MAP_VOCAB_SLOTS,
    PRE_GAME_WIDTH,
    FeatureManifest,
    build_map_vocabulary,
)
from .selection import calibrate_threshold
from .skills import ALL_SKILLS, BASIC_SKILLS, COUNT_SKILLS
from .windows import WindowConfig, compute_window_config, percentile_index, _DFT

_N_SKILLS = len(ALL_SKILLS)
_COUNT_MASK = np.array([s in COUNT_SKILLS for s in ALL_SKILLS])
_SIDE_COL = {"nk": "kills", "nd": "deaths", "kd_diff": "kddiff", "adr": "adr", "prakst": "kast", "rating": "rating"}


@dataclass
class FusionReport:
    n_games: int = 0
    n_fused: int = 0
    n_dropped_cardinality: int = 0
    n_dropped_map: int = 0
    n_ties_excluded: int = 0


def window_stats_block(matrix: np.ndarray, window: int) -> np.ndarray:
    """Vectorised window statistics: (history, skills) -> (skills, 6).

    Column-wise equivalent of :func:`winstream.windows.window_stats`.
    """
    n_avail = matrix.shape[0]
    eff = min(window, n_avail)
    tail = matrix[-eff:]
    ordered = np.sort(tail, axis=0)
    avg = tail.mean(axis=0)
    q1 = ordered[percentile_index(eff, 0.25)]
    q2 = ordered[percentile_index(eff, 0.50)]
    q3 = ordered[percentile_index(eff, 0.75)]
    std = np.sqrt(np.maximum(0.0, ((tail - avg) ** 2).mean(axis=0)))
    if eff == 1:
        fft_max = np.abs(tail[0])
    else:
        bins = _DFT.matrix(eff).T @ tail
        fft_max = np.abs(bins).max(axis=0)
    return np.stack([avg, q1, q2, q3, std, fft_max], axis=1)


class _History:
    """Per-player ring of overall skill vectors (rows of shape (10,))."""

    __slots__ = ("ring",)

    def __init__(self, capacity: int):
        self.ring = deque(maxlen=capacity)

    def matrix(self) -> np.ndarray:
        return np.stack(self.ring)


def _team_pre_game(histories: list[_History | None], lengths) -> np.ndarray:
    """Aggregate the five players' window blocks by the roster rule."""
    per_player = np.zeros((5, _N_SKILLS, len(lengths), 6))
    for pi, h in enumerate(histories):
        if h is None or not h.ring:
            continue
        matrix = h.matrix()
        for wi, window in enumerate(lengths):
            per_player[pi, :, wi, :] = window_stats_block(matrix, window)
    sums = per_player.sum(axis=0)
    agg = np.where(_COUNT_MASK[:, None, None], sums, sums / 5.0)
    return agg.reshape(-1)


@dataclass
class StreamSample:
    """One fused game; the pre-game block materialises on demand."""

    index: int
    key: tuple
    date: dt.date
    label: int
    in_game: np.ndarray
    _cursor: "StreamCursor" = field(repr=False, default=None)
    pre_game: np.ndarray | None = None
    meta: dict | None = None

    def materialise(self) -> np.ndarray:
        if self.pre_game is None:
            self.pre_game = self._cursor.pre_game_diff(self.index)
        return self.pre_game

    def vector(self) -> np.ndarray:
        return np.concatenate([self.in_game, self.materialise()])

    def to_fused(self) -> FusedSample:
        return FusedSample(
            key=self.key, date=self.date, label=self.label,
            in_game=self.in_game, pre_game=self.materialise(),
        )


class StreamCursor:
    """One consumer's position in the fused stream with private histories.

    Histories advance for a sample when the next one is pulled, so the
    pre-game block must be materialised (if wanted) before moving on; a
    pending marker tracks the not-yet-folded sample so snapshots can flush
    it and capture a clean boundary.
    """

    def __init__(self, builder: "FusedStreamBuilder", position: int, histories: dict):
        self.builder = builder
        self.position = position
        self.histories = histories
        self._pending: int | None = None

    def _flush_pending(self) -> None:
        if self._pending is not None:
            self.builder._advance_histories(self.histories, self._pending)
            self.position = self._pending + 1
            self._pending = None

    def pre_game_diff(self, index: int) -> np.ndarray:
        if self._pending != index:
            raise RuntimeError(
                f"pre-game block for game {index} requested after the stream advanced "
                f"(now at {self.position}); materialise before consuming the next sample"
            )
        return self.builder._pre_game_diff_from(self.histories, index)

    def team_recent_skill_panel(self, index: int) -> dict:
        return self.builder._team_panel_from(self.histories, index)

    def next_sample(self) -> StreamSample | None:
        self._flush_pending()
        builder = self.builder
        if self.position >= builder.report.n_fused:
            return None
        i = self.position
        self._pending = i
        date = pd.Timestamp(builder._dates[i]).date()
        return StreamSample(
            index=i,
            key=(date.isoformat(), *builder.game_key(i)),
            date=date,
            label=int(builder._labels[i]),
            in_game=builder._in_game[i],
            _cursor=self,
        )

    def samples(self):
        while True:
            sample = self.next_sample()
            if sample is None:
                return
            yield sample

    def snapshot_state(self) -> dict:
        self._flush_pending()
        return {
            "position": self.position,
            "histories": self.builder._copy_histories(self.histories),
        }


class FusedStreamBuilder:
    """Drives the full pipeline from loaded tables to a fused sample stream."""

    def __init__(self, match_table, player_table, cold_start_fraction: float = 0.10,
                 epoch_date: dt.date | None = None):
        if not 0 < cold_start_fraction < 1:
            raise ValueError("cold-start fraction must be in (0, 1)")
        self.match_table = match_table
        self.player_table = player_table
        self.cold_start_fraction = cold_start_fraction
        self.epoch_date = epoch_date
        self.report = FusionReport()
        self.window_config: WindowConfig | None = None
        self.manifest: FeatureManifest | None = None
        self.chunk_matrix: np.ndarray | None = None
        self.n_chunk = 0
        self._prepared = False

    # ------------------------------------------------------------- bulk join

    def prepare(self) -> "FusedStreamBuilder":
        if self._prepared:
            return self
        self._join_games()
        self._compute_in_game_scalars()
        self._calibrate_chunk()
        self._prepared = True
        return self

    def _join_games(self) -> None:
        players = self.player_table.frame
        matches = self.match_table.frame
        self.report.n_games = len(matches)

        keys = pd.MultiIndex.from_arrays(
            [players["event_id"].astype(str), players["match_id"].astype(str)]
        )
        groups: dict = {}
        for pos, key in enumerate(keys):
            groups.setdefault(key, []).append(pos)

        p_team = players["team"].astype(str).to_numpy()
        p_maps = [players[f"map_{k}"].astype(str).to_numpy() for k in (1, 2, 3)]
        player_codes, self._player_ids = pd.factorize(players["player_id"].astype(str))

        m_event = matches["event_id"].astype(str).to_numpy()
        m_match = matches["match_id"].astype(str).to_numpy()
        m_map = matches["_map"].astype(str).to_numpy()
        m_team1 = matches["team_1"].astype(str).to_numpy()
        m_team2 = matches["team_2"].astype(str).to_numpy()
        m_res1 = matches["result_1"].to_numpy()
        m_res2 = matches["result_2"].to_numpy()

        fused_rows, fused_games, team1_masks, map_slots, labels = [], [], [], [], []
        for g in range(len(matches)):
            if m_res1[g] == m_res2[g]:
                self.report.n_ties_excluded += 1
                continue
            rows = groups.get((m_event[g], m_match[g]))
            if rows is None or len(rows) != 10:
                self.report.n_dropped_cardinality += 1
                continue
            t1 = [r for r in rows if p_team[r] == m_team1[g]]
            t2 = [r for r in rows if p_team[r] == m_team2[g]]
            if len(t1) != 5 or len(t2) != 5:
                self.report.n_dropped_cardinality += 1
                continue
            slot = next((k for k in (1, 2, 3) if p_maps[k - 1][rows[0]] == m_map[g]), None)
            if slot is None:
                self.report.n_dropped_map += 1
                continue
            fused_rows.append(t1 + t2)
            fused_games.append(g)
            team1_masks.append([True] * 5 + [False] * 5)
            map_slots.append(slot)
            labels.append(0 if m_res1[g] > m_res2[g] else 1)

        self.report.n_fused = len(fused_games)
        self._rows = np.asarray(fused_rows, dtype=np.int64)
        self._games = np.asarray(fused_games, dtype=np.int64)
        self._team1 = np.asarray(team1_masks, dtype=bool)
        self._slots = np.asarray(map_slots, dtype=np.int64)
        self._labels = np.asarray(labels, dtype=np.int64)
        self._codes = player_codes[self._rows]
        overall_cols = ["adr", "deaths", "kast", "kills", "kddiff", "rating",
                        "assists", "flash_assists", "hs", "fkdiff"]
        self._overall = players[overall_cols].to_numpy(dtype=float)

    def _compute_in_game_scalars(self) -> None:
        players = self.player_table.frame
        matches = self.match_table.frame
        g = self._games
        n = len(g)

        dates = matches["date"].to_numpy()[g]
        epoch = np.datetime64(self.epoch_date) if self.epoch_date else matches["date"].to_numpy().min()
        self._dates = dates
        self._date_days = ((dates - epoch) / np.timedelta64(1, "D")).astype(float)
        self._map_names = matches["_map"].astype(str).to_numpy()[g]

        starting_ct = matches["starting_ct"].to_numpy()[g]
        ct_1 = matches["ct_1"].to_numpy(dtype=float)[g]
        t_1 = matches["t_1"].to_numpy(dtype=float)[g]
        ct_2 = matches["ct_2"].to_numpy(dtype=float)[g]
        t_2 = matches["t_2"].to_numpy(dtype=float)[g]
        t1_ct = starting_ct == 1
        self._scores = np.zeros((n, 4))
        self._scores[:, 0] = np.where(t1_ct, ct_1, 0.0)
        self._scores[:, 1] = np.where(~t1_ct, t_1, 0.0)
        self._scores[:, 2] = np.where(~t1_ct, ct_2, 0.0)
        self._scores[:, 3] = np.where(t1_ct, t_2, 0.0)
        self._ranks = np.stack(
            [matches["rank_1"].to_numpy(dtype=float)[g], matches["rank_2"].to_numpy(dtype=float)[g]], axis=1
        )

        # second-half rounds per team: the side not opened on
        t1_h2 = np.where(t1_ct, t_1, ct_1)
        t2_h2 = np.where(t1_ct, ct_2, t_2)
        row_h2 = np.where(self._team1, t1_h2[:, None], t2_h2[:, None])
        row_started_ct = self._team1 == t1_ct[:, None]

        def side_matrix(col_base: str, side: str) -> np.ndarray:
            return players[f"{col_base}_{side}"].to_numpy(dtype=float)[self._rows]

        def map_side_matrix(col_base: str, side: str) -> np.ndarray:
            stacked = np.stack(
                [players[f"m{k}_{col_base}_{side}"].to_numpy(dtype=float)[self._rows] for k in (1, 2, 3)]
            )
            rows_idx = np.broadcast_to(np.arange(n)[:, None], (n, 10))
            cols_idx = np.broadcast_to(np.arange(10)[None, :], (n, 10))
            return stacked[(self._slots - 1)[:, None], rows_idx, cols_idx]

        # layout matches the manifest: team1 map(6), team1 all(6), then team2
        skills = np.zeros((n, 24))
        for si, scope in enumerate(("map", "all")):
            for ki, skill in enumerate(BASIC_SKILLS):
                base = _SIDE_COL[skill]
                v_ct = map_side_matrix(base, "ct") if scope == "map" else side_matrix(base, "ct")
                v_t = map_side_matrix(base, "t") if scope == "map" else side_matrix(base, "t")
                h1 = np.where(row_started_ct, v_ct, v_t)
                h2 = np.where(row_started_ct, v_t, v_ct)
                with np.errstate(divide="ignore", invalid="ignore"):
                    eq = h1 + np.where(row_h2 > 0, h2 / np.maximum(row_h2, 1), 0.0)
                t1_vals = np.where(self._team1, eq, 0.0).sum(axis=1)
                t2_vals = np.where(~self._team1, eq, 0.0).sum(axis=1)
                if skill not in COUNT_SKILLS:
                    t1_vals, t2_vals = t1_vals / 5.0, t2_vals / 5.0
                skills[:, 6 * si + ki] = t1_vals
                skills[:, 12 + 6 * si + ki] = t2_vals
        self._team_skills = skills

    def _assemble_in_game(self) -> None:
        n = len(self._games)
        out = np.zeros((n, IN_GAME_WIDTH))
        out[:, 0] = self._date_days
        slots = np.array([self.manifest.map_slot(m) for m in self._map_names])
        out[np.arange(n), 1 + slots] = 1.0
        out[:, 9:13] = self._scores
        out[:, 13:15] = self._ranks
        out[:, 15:39] = self._team_skills
        self._in_game = out

    # ----------------------------------------------------------- calibration

    def _calibrate_chunk(self) -> None:
        n_fused = self.report.n_fused
        self.n_chunk = int(np.floor(self.cold_start_fraction * n_fused))
        if self.n_chunk < 2:
            raise ValueError("cold-start chunk needs at least 2 fused games")
        chunk_codes = self._codes[: self.n_chunk].ravel()
        _, counts = np.unique(chunk_codes, return_counts=True)
        self.window_config = compute_window_config(counts.tolist())
        vocab = build_map_vocabulary(self._map_names[: self.n_chunk].tolist())
        self.manifest = FeatureManifest(map_vocabulary=vocab)
        self._assemble_in_game()

        histories = {}
        chunk = np.zeros((self.n_chunk, IN_GAME_WIDTH + PRE_GAME_WIDTH))
        for i in range(self.n_chunk):
            chunk[i, :IN_GAME_WIDTH] = self._in_game[i]
            chunk[i, IN_GAME_WIDTH:] = self._pre_game_diff_from(histories, i)
            self._advance_histories(histories, i)
        self.chunk_matrix = chunk
        self._post_chunk_histories = histories

    # ------------------------------------------------------------- streaming

    def _pre_game_diff_from(self, histories: dict, index: int) -> np.ndarray:
        lengths = self.window_config.lengths
        codes = self._codes[index]
        team1 = [histories.get(int(c)) for c in codes[:5]]
        team2 = [histories.get(int(c)) for c in codes[5:]]
        return _team_pre_game(team1, lengths) - _team_pre_game(team2, lengths)

    def _advance_histories(self, histories: dict, index: int) -> None:
        capacity = self.window_config.capacity
        for j, code in enumerate(self._codes[index]):
            h = histories.get(int(code))
            if h is None:
                h = histories[int(code)] = _History(capacity)
            h.ring.append(self._overall[self._rows[index, j]])

    def _copy_histories(self, histories: dict) -> dict:
        out = {}
        for code, h in histories.items():
            fresh = _History(h.ring.maxlen)
            fresh.ring.extend(h.ring)
            out[code] = fresh
        return out

    def game_meta(self, index: int) -> dict:
        matches = self.match_table.frame
        g = int(self._games[index])
        row = matches.iloc[g]
        return {
            "event_id": str(row["event_id"]),
            "game_id": str(row["match_id"]),
            "map": str(row["_map"]),
            "date": str(pd.Timestamp(row["date"]).date()),
            "team1": str(row["team_1"]),
            "team2": str(row["team_2"]),
            "rank1": int(row["rank_1"]),
            "rank2": int(row["rank_2"]),
            "score_h1": [int(self._scores[index, :2].sum()), int(self._scores[index, 2:].sum())],
            "final_score": [int(row["result_1"]), int(row["result_2"])],
        }

    def _team_panel_from(self, histories: dict, index: int) -> dict:
        """Per-team averages of basic skills over the mean-sized window, for
        display next to a live prediction."""
        panel = {}
        lengths = (self.window_config.average_window,)
        for side, sl in (("team1", slice(0, 5)), ("team2", slice(5, 10))):
            agg = _team_pre_game(
                [histories.get(int(c)) for c in self._codes[index][sl]], lengths
            ).reshape(_N_SKILLS, 1, 6)
            panel[side] = {
                skill: round(float(agg[si, 0, 0]), 3)
                for si, skill in enumerate(ALL_SKILLS)
                if skill in BASIC_SKILLS
            }
        return panel

    def cursor(self, start_index: int | None = None, histories: dict | None = None) -> StreamCursor:
        """Fresh stream position with private histories.

        Histories advance after each yielded sample is consumed, so a
        sample's pre-game block must be materialised (if wanted) before
        pulling the next one.
        """
        self.prepare()
        begin = self.n_chunk if start_index is None else start_index
        if histories is not None:
            live = self._copy_histories(histories)
        else:
            live = self._copy_histories(self._post_chunk_histories)
            for i in range(self.n_chunk, begin):
                self._advance_histories(live, i)
        return StreamCursor(self, begin, live)

    def stream(self, start_index: int | None = None, histories: dict | None = None):
        """Yield post-chunk samples in date order from a fresh cursor."""
        return self.cursor(start_index, histories).samples()

    def game_key(self, index: int) -> tuple:
        matches = self.match_table.frame
        g = int(self._games[index])
        return (
            str(matches["event_id"].iloc[g]),
            str(matches["match_id"].iloc[g]),
            str(matches["_map"].iloc[g]),
        )

    @property
    def n_post_chunk(self) -> int:
        return self.report.n_fused - self.n_chunk

    def class_counts(self) -> tuple[int, int]:
        return int((self._labels == 0).sum()), int((self._labels == 1).sum())
