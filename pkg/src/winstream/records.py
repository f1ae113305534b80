"""Typed records for the two dataset files.

A player row covers one match (up to three games on different maps); the
results file carries one row per game.  Half-scoped skills and scores are
engineered from side-scoped ones once a record's team can be resolved to a
starting side.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field, replace

from .skills import BASIC_SKILLS, SIDES


@dataclass(frozen=True)
class MatchRecord:
    """One game between two teams (the source file's per-map result row)."""

    date: dt.date
    event_id: str
    game_id: str
    map_name: str
    team1_id: str
    team2_id: str
    rank1: int
    rank2: int
    starting_ct_team: str
    score_by_team_and_side: dict  # team_id -> {"ct": int, "t": int}
    winner: int | None  # 0 = team1, 1 = team2, None = tie/undecided
    score_by_team_and_half: dict | None = None  # team_id -> {1: int, 2: int}

    def total_score(self, team_id: str) -> int:
        sides = self.score_by_team_and_side[team_id]
        return sides["ct"] + sides["t"]

    def started_ct(self, team_id: str) -> bool:
        if team_id not in (self.team1_id, self.team2_id):
            raise KeyError(f"team {team_id} not part of game {self.game_id}")
        return team_id == self.starting_ct_team

    def with_half_scores(self) -> "MatchRecord":
        halves = {}
        for team_id in (self.team1_id, self.team2_id):
            sides = self.score_by_team_and_side[team_id]
            first = "ct" if self.started_ct(team_id) else "t"
            second = "t" if first == "ct" else "ct"
            halves[team_id] = {1: sides[first], 2: sides[second]}
        return replace(self, score_by_team_and_half=halves)


@dataclass(frozen=True)
class PlayerGameRecord:
    """One player's skill line for one match (and, once resolved against a
    specific game, the derived half-scoped views for that game's map)."""

    date: dt.date
    event_id: str
    game_id: str
    team_id: str
    player_id: str
    maps: tuple[str, ...]
    skills_overall: dict  # all 10 skills
    skills_by_side: dict  # side -> 6 basic skills
    skills_by_map_and_side: dict  # map_name -> side -> basic skills
    player_name: str = ""
    best_of: int = 1
    skills_by_half: dict | None = None  # half -> basic skills (engineered)
    skills_by_map_and_half: dict | None = None  # half -> basic skills on the game map

    def has_half_features(self) -> bool:
        return self.skills_by_half is not None


def assign_half_features(player: PlayerGameRecord, match: MatchRecord) -> PlayerGameRecord:
    """Reassign side-scoped skills to halves using the match's starting side.

    The team that starts counter-terrorist plays terrorist in the second
    half, so half 1 takes the side the team opened on.  Only side-scoped
    fields are reorganised; the overall skills are untouched.
    """
    if (player.event_id, player.game_id) != (match.event_id, match.game_id):
        raise ValueError("player and match rows do not share a join key")
    first = "ct" if match.started_ct(player.team_id) else "t"
    second = "t" if first == "ct" else "ct"

    by_half = {
        1: dict(player.skills_by_side[first]),
        2: dict(player.skills_by_side[second]),
    }
    map_sides = player.skills_by_map_and_side.get(match.map_name)
    if map_sides is None:
        raise ValueError(
            f"player {player.player_id} has no skills for map {match.map_name}"
        )
    by_map_half = {1: dict(map_sides[first]), 2: dict(map_sides[second])}
    return replace(player, skills_by_half=by_half, skills_by_map_and_half=by_map_half)


def empty_basic() -> dict:
    return {skill: 0.0 for skill in BASIC_SKILLS}


def validate_sides(block: dict) -> bool:
    return all(side in block for side in SIDES)
