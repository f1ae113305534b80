"""Dataset loading, validation, ordering and date filtering.

Both files parse through the schema manifest; malformed rows are counted
and skipped, never imputed.  Records come back sorted ascending by
(date, event_id, game_id) so downstream consumers see a timestamped
stream.  Large runs use the table form directly; the record iterators
materialise typed records on demand.
"""

from __future__ import annotations

import datetime as dt
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from . import schema
from .records import MatchRecord, PlayerGameRecord
from .skills import BASIC_SKILLS

_SIDE_COLS = schema.player_side_columns()
_MAP_SIDE_COLS = schema.player_map_side_columns()


class DatasetError(ValueError):
    pass


def _read_csv(path, required, label: str) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"{label} file not found: {path}")
    frame = pd.read_csv(path, low_memory=False)
    schema.check_header(frame.columns, required, label)
    return frame


def _parse_dates(series: pd.Series) -> pd.Series:
    return pd.to_datetime(series, format="%Y-%m-%d", errors="coerce")


@dataclass
class PlayerTable:
    frame: pd.DataFrame
    skipped: int

    def __len__(self) -> int:
        return len(self.frame)

    def __iter__(self):
        for i in range(len(self.frame)):
            yield self.record(i)

    def record(self, i: int) -> PlayerGameRecord:
        row = self.frame.iloc[i]
        maps = tuple(m for m in (row["map_1"], row["map_2"], row["map_3"]) if isinstance(m, str) and m)
        by_side = {"ct": {}, "t": {}}
        for col, (side, skill) in _SIDE_COLS.items():
            by_side[side][skill] = float(row[col])
        by_map_side = {}
        for slot, map_name in enumerate(maps, start=1):
            sides = {"ct": {}, "t": {}}
            for col, (cslot, side, skill) in _MAP_SIDE_COLS.items():
                if cslot == slot:
                    sides[side][skill] = float(row[col])
            by_map_side[map_name] = sides
        return PlayerGameRecord(
            date=row["date"].date() if hasattr(row["date"], "date") else row["date"],
            event_id=str(row["event_id"]),
            game_id=str(row["match_id"]),
            team_id=str(row["team"]),
            player_id=str(row["player_id"]),
            player_name=str(row["player_name"]),
            best_of=int(row["best_of"]),
            maps=maps,
            skills_overall={skill: float(row[col]) for col, skill in schema.PLAYER_OVERALL_COLUMNS.items()},
            skills_by_side=by_side,
            skills_by_map_and_side=by_map_side,
        )


@dataclass
class MatchTable:
    frame: pd.DataFrame
    skipped: int
    n_ties: int

    def __len__(self) -> int:
        return len(self.frame)

    def __iter__(self):
        for i in range(len(self.frame)):
            yield self.record(i)

    def record(self, i: int) -> MatchRecord:
        row = self.frame.iloc[i]
        team1, team2 = str(row["team_1"]), str(row["team_2"])
        totals = {team1: int(row["result_1"]), team2: int(row["result_2"])}
        winner = None
        if totals[team1] != totals[team2]:
            winner = 0 if totals[team1] > totals[team2] else 1
        return MatchRecord(
            date=row["date"].date() if hasattr(row["date"], "date") else row["date"],
            event_id=str(row["event_id"]),
            game_id=str(row["match_id"]),
            map_name=str(row["_map"]),
            team1_id=team1,
            team2_id=team2,
            rank1=int(row["rank_1"]),
            rank2=int(row["rank_2"]),
            starting_ct_team=team1 if int(row["starting_ct"]) == 1 else team2,
            score_by_team_and_side={
                team1: {"ct": int(row["ct_1"]), "t": int(row["t_1"])},
                team2: {"ct": int(row["ct_2"]), "t": int(row["t_2"])},
            },
            winner=winner,
        ).with_half_scores()


def load_players(path) -> PlayerTable:
    frame = _read_csv(path, schema.PLAYERS_REQUIRED, "players")
    n_raw = len(frame)
    if n_raw == 0:
        return PlayerTable(frame=frame, skipped=0)
    frame = frame.copy()
    frame["date"] = _parse_dates(frame["date"])

    numeric_cols = list(schema.PLAYER_OVERALL_COLUMNS) + list(_SIDE_COLS)
    for col in numeric_cols:
        frame[col] = pd.to_numeric(frame[col], errors="coerce")
    ok = frame["date"].notna()
    ok &= frame[numeric_cols].notna().all(axis=1)
    ok &= frame["kast"].between(0.0, 100.0)
    for col in ("kills", "deaths", "assists", "hs", "flash_assists"):
        ok &= frame[col] >= 0
    kept = frame[ok].sort_values(["date", "event_id", "match_id"], kind="stable")
    kept = kept.reset_index(drop=True)
    if len(kept) == 0 and n_raw > 0:
        raise DatasetError("players file contained zero parseable rows")
    return PlayerTable(frame=kept, skipped=n_raw - len(kept))


def load_matches(path) -> MatchTable:
    frame = _read_csv(path, schema.RESULTS_REQUIRED, "results")
    n_raw = len(frame)
    if n_raw == 0:
        return MatchTable(frame=frame, skipped=0, n_ties=0)
    frame = frame.copy()
    frame["date"] = _parse_dates(frame["date"])
    numeric = ["result_1", "result_2", "ct_1", "t_1", "ct_2", "t_2", "rank_1", "rank_2", "starting_ct"]
    for col in numeric:
        frame[col] = pd.to_numeric(frame[col], errors="coerce")
    ok = frame["date"].notna() & frame[numeric].notna().all(axis=1)
    ok &= frame["starting_ct"].isin((1, 2))
    for col in ("result_1", "result_2", "ct_1", "t_1", "ct_2", "t_2", "rank_1", "rank_2"):
        ok &= frame[col] >= 0
    # side scores must sum to the reported totals
    ok &= (frame["ct_1"] + frame["t_1"]) == frame["result_1"]
    ok &= (frame["ct_2"] + frame["t_2"]) == frame["result_2"]
    kept = frame[ok].sort_values(["date", "event_id", "match_id", "_map"], kind="stable")
    kept = kept.reset_index(drop=True)
    if len(kept) == 0 and n_raw > 0:
        raise DatasetError("results file contained zero parseable rows")
    n_ties = int((kept["result_1"] == kept["result_2"]).sum())
    return MatchTable(frame=kept, skipped=n_raw - len(kept), n_ties=n_ties)


@dataclass
class FilterResult:
    retained: object  # same table type as the input
    n_retained: int
    n_dropped: int
    cutoff: dt.date | None


def filter_by_date(table, cutoff: dt.date | None) -> FilterResult:
    """Keep rows dated up to (and including) the cutoff.

    A ``None`` cutoff keeps everything; a predicate callable is accepted in
    place of a date for irregular selections.
    """
    frame = table.frame
    if cutoff is None:
        mask = np.ones(len(frame), dtype=bool)
    elif callable(cutoff):
        mask = frame["date"].map(lambda d: bool(cutoff(d.date()))).to_numpy()
    else:
        mask = (frame["date"] <= pd.Timestamp(cutoff)).to_numpy()
    kept = frame[mask].reset_index(drop=True)
    if len(kept) == 0:
        raise DatasetError("date filter eliminated every row")
    retained = type(table)(**{**table.__dict__, "frame": kept})
    return FilterResult(
        retained=retained,
        n_retained=len(kept),
        n_dropped=len(frame) - len(kept),
        cutoff=cutoff if isinstance(cutoff, dt.date) else None,
    )


def recover_cutoff(table, target_count: int) -> dt.date:
    """Binary-search the distinct dates for the cutoff whose inclusive
    prefix holds exactly ``target_count`` rows."""
    dates = np.sort(table.frame["date"].to_numpy())
    if not 0 < target_count <= len(dates):
        raise DatasetError(f"target count {target_count} out of range (1..{len(dates)})")
    distinct = pd.Series(dates).drop_duplicates().tolist()
    lo, hi = 0, len(distinct) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        count = bisect_right(dates, np.datetime64(distinct[mid]))
        if count == target_count:
            best = distinct[mid]
            break
        if count < target_count:
            lo = mid + 1
        else:
            hi = mid - 1
    if best is None:
        raise DatasetError(f"no date cutoff retains exactly {target_count} rows")
    return pd.Timestamp(best).date()
