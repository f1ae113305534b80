"""Join ten player rows with a game row and aggregate skills to team level.

Each player's half-scoped skills collapse to a single vector as
``h1 + h2 / rounds_won_h2`` (componentwise, second term zero when the team
won no second-half rounds), then the five players aggregate by the roster
rule: counts sum, rates average.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .records import MatchRecord, PlayerGameRecord, assign_half_features
from .skills import BASIC_SKILLS, aggregate_roster


class FusionError(ValueError):
    pass


def team_skill(skills_h1: dict, skills_h2: dict, rounds_won_h2: int) -> dict:
    """Combine half-scoped skills into one vector; zero divisor guards to 0."""
    if rounds_won_h2 < 0:
        raise ValueError("rounds won cannot be negative")
    out = {}
    for skill, v1 in skills_h1.items():
        v2 = skills_h2.get(skill, 0.0)
        out[skill] = v1 + (v2 / rounds_won_h2 if rounds_won_h2 > 0 else 0.0)
    return out


@dataclass(frozen=True)
class TeamSnapshot:
    event_id: str
    game_id: str
    team_id: str
    map_name: str
    date: dt.date
    player_ids: tuple[str, ...]
    hltv_rank: int
    score_first_half_own_side: int
    aggregated_skills: dict  # map-scoped basic skills, halves combined
    aggregated_skills_all_maps: dict  # all-maps basic skills, halves combined

    def __post_init__(self):
        if len(set(self.player_ids)) != 5:
            raise FusionError(f"team {self.team_id} needs 5 distinct players")
        for block in (self.aggregated_skills, self.aggregated_skills_all_maps):
            for skill, value in block.items():
                if not np.isfinite(value):
                    raise FusionError(f"non-finite aggregate for {skill}")


@dataclass
class FusedSample:
    key: tuple  # (date, event_id, game_id, map_name)
    date: dt.date
    label: int  # 0 = Team1 winner, 1 = Team2 winner
    in_game: np.ndarray
    pre_game: np.ndarray | None  # filled by the window engine
    team1: TeamSnapshot | None = None
    team2: TeamSnapshot | None = None

    def vector(self) -> np.ndarray:
        if self.pre_game is None:
            raise ValueError("pre-game block not materialised")
        return np.concatenate([self.in_game, self.pre_game])


def _aggregate(players_skills: list[dict]) -> dict:
    out = {}
    for skill in BASIC_SKILLS:
        out[skill] = aggregate_roster([p[skill] for p in players_skills], skill)
    return out


def fuse_game(match: MatchRecord, players: list[PlayerGameRecord]) -> tuple[TeamSnapshot, TeamSnapshot]:
    """Aggregate the five players of each side into team snapshots."""
    if len(players) != 10:
        raise FusionError(f"game {match.game_id} joined {len(players)} player rows, expected 10")
    key = (match.event_id, match.game_id)
    rosters = {match.team1_id: [], match.team2_id: []}
    for p in players:
        if (p.event_id, p.game_id) != key:
            raise FusionError("player row key does not match the game")
        if p.team_id not in rosters:
            raise FusionError(f"player {p.player_id} belongs to neither team")
        rosters[p.team_id].append(p)
    if any(len(r) != 5 for r in rosters.values()):
        raise FusionError("each team needs exactly 5 player rows")

    if match.score_by_team_and_half is None:
        match = match.with_half_scores()

    snapshots = []
    for team_id in (match.team1_id, match.team2_id):
        rounds_h2 = match.score_by_team_and_half[team_id][2]
        map_scope, all_scope = [], []
        roster_ids = []
        for p in rosters[team_id]:
            if not p.has_half_features():
                p = assign_half_features(p, match)
            map_scope.append(team_skill(p.skills_by_map_and_half[1], p.skills_by_map_and_half[2], rounds_h2))
            all_scope.append(team_skill(p.skills_by_half[1], p.skills_by_half[2], rounds_h2))
            roster_ids.append(p.player_id)
        snapshots.append(
            TeamSnapshot(
                event_id=match.event_id,
                game_id=match.game_id,
                team_id=team_id,
                map_name=match.map_name,
                date=match.date,
                player_ids=tuple(roster_ids),
                hltv_rank=match.rank1 if team_id == match.team1_id else match.rank2,
                score_first_half_own_side=match.score_by_team_and_half[team_id][1],
                aggregated_skills=_aggregate(map_scope),
                aggregated_skills_all_maps=_aggregate(all_scope),
            )
        )
    return snapshots[0], snapshots[1]
