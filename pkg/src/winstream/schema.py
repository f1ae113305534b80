"""Versioned schema manifest for the two dataset files.

The manifest maps physical CSV columns to semantic fields so a renamed or
reordered header is detected as dataset drift instead of being guessed at.
Loaders refuse files whose headers miss required columns.
"""

from __future__ import annotations

SCHEMA_VERSION = 1

# players file: one row per (player, match)
PLAYER_META_COLUMNS = {
    "date": "date",
    "player_name": "player_name",
    "team": "team_id",
    "opponent": "opponent_id",
    "country": "country",
    "player_id": "player_id",
    "match_id": "game_id",
    "event_id": "event_id",
    "event_name": "event_name",
    "best_of": "best_of",
    "map_1": "map_1",
    "map_2": "map_2",
    "map_3": "map_3",
}

# overall skill columns -> internal skill names
PLAYER_OVERALL_COLUMNS = {
    "kills": "nk",
    "assists": "nass",
    "deaths": "nd",
    "hs": "nhs",
    "flash_assists": "nfa",
    "kast": "prakst",
    "kddiff": "kd_diff",
    "adr": "adr",
    "fkdiff": "fkfd_diff",
    "rating": "rating",
}

_SIDE_BASIC = {
    "kills": "nk",
    "deaths": "nd",
    "kddiff": "kd_diff",
    "adr": "adr",
    "kast": "prakst",
    "rating": "rating",
}


def player_side_columns() -> dict:
    """side-scoped basic skills, e.g. kills_ct -> (ct, nk)."""
    return {f"{col}_{side}": (side, skill) for side in ("ct", "t") for col, skill in _SIDE_BASIC.items()}


def player_map_side_columns() -> dict:
    """per-map-slot side-scoped basics, e.g. m1_kills_ct -> (1, ct, nk)."""
    out = {}
    for slot in (1, 2, 3):
        for side in ("ct", "t"):
            for col, skill in _SIDE_BASIC.items():
                out[f"m{slot}_{col}_{side}"] = (slot, side, skill)
    return out


RESULT_COLUMNS = {
    "date": "date",
    "team_1": "team1_id",
    "team_2": "team2_id",
    "_map": "map_name",
    "result_1": "result1",
    "result_2": "result2",
    "map_winner": "map_winner",
    "starting_ct": "starting_ct",
    "ct_1": "ct_1",
    "t_2": "t_2",
    "t_1": "t_1",
    "ct_2": "ct_2",
    "event_id": "event_id",
    "match_id": "game_id",
    "rank_1": "rank1",
    "rank_2": "rank2",
    "map_wins_1": "map_wins_1",
    "map_wins_2": "map_wins_2",
    "match_winner": "match_winner",
}

PLAYERS_REQUIRED = (
    list(PLAYER_META_COLUMNS)
    + list(PLAYER_OVERALL_COLUMNS)
    + list(player_side_columns())
    + list(player_map_side_columns())
)
RESULTS_REQUIRED = list(RESULT_COLUMNS)


class SchemaMismatch(ValueError):
    """Header does not match the schema manifest (wrong dataset version)."""


def check_header(columns, required, label: str) -> None:
    missing = [c for c in required if c not in columns]
    if missing:
        raise SchemaMismatch(
            f"{label} file header missing {len(missing)} expected column(s) "
            f"(schema v{SCHEMA_VERSION}): {missing[:8]}{'…' if len(missing) > 8 else ''}"
        )


def manifest_document() -> dict:
    """Machine-readable schema manifest for export alongside artifacts."""
    return {
        "version": SCHEMA_VERSION,
        "players": {
            "meta": PLAYER_META_COLUMNS,
            "overall": PLAYER_OVERALL_COLUMNS,
            "by_side": {k: list(v) for k, v in player_side_columns().items()},
            "by_map_and_side": {k: list(v) for k, v in player_map_side_columns().items()},
        },
        "results": RESULT_COLUMNS,
    }
