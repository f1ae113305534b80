"""Single source of truth for the model-facing feature layout.

39 in-game features: event date, an 8-slot map vocabulary (7 maps plus a
reserved "other"), the first-half scores resolved by team and side, the two
HLTV ranks, and per-team aggregates of the six basic skills at two scopes
(on the game's map and across all maps).  240 pre-game features: 10 skills
x 4 sliding windows x 6 statistics, expressed as team1 minus team2
differences of the roster aggregates.

The manifest is exported as a machine-readable document; the explanation
renderer and the dashboard resolve feature indices through it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .skills import ALL_SKILLS, BASIC_SKILLS, COUNT_SKILLS
from .windows import STAT_NAMES, WINDOW_NAMES

MAP_VOCAB_SLOTS = 7
OTHER_MAP = "__other__"

IN_GAME_WIDTH = 1 + (MAP_VOCAB_SLOTS + 1) + 4 + 2 + 2 * 2 * len(BASIC_SKILLS)  # 39
PRE_GAME_WIDTH = len(ALL_SKILLS) * len(WINDOW_NAMES) * len(STAT_NAMES)  # 240
TOTAL_WIDTH = IN_GAME_WIDTH + PRE_GAME_WIDTH  # 279

_SKILL_PHRASES = {
    "adr": "average damage per round",
    "nd": "deaths",
    "prakst": "percent of rounds with a kill, assist, survival or trade",
    "nk": "kills",
    "kd_diff": "kill-death difference",
    "rating": "match rating",
    "nass": "assists",
    "nfa": "flash assists",
    "nhs": "headshots",
    "fkfd_diff": "first-kill/first-death difference",
}
_STAT_PHRASES = {
    "avg": "average",
    "q1": "lower quartile",
    "q2": "median",
    "q3": "upper quartile",
    "std": "spread",
    "fft_max": "strongest cycle strength",
}
_WINDOW_PHRASES = {
    "avg": "mean-sized game window",
    "q1": "short game window",
    "q2": "medium game window",
    "q3": "long game window",
}


@dataclass(frozen=True)
class FeatureEntry:
    index: int
    name: str
    group: str  # date | map | score | rank | team_skill | pre_game
    phrase: str
    skill: str | None = None
    window: str | None = None
    statistic: str | None = None
    team: str | None = None  # team1 | team2 | diff
    aggregation: str | None = None  # sum | mean


@dataclass(frozen=True)
class FeatureManifest:
    map_vocabulary: tuple[str, ...]  # alphabetical, without the reserved slot
    entries: tuple[FeatureEntry, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if len(self.map_vocabulary) > MAP_VOCAB_SLOTS:
            raise ValueError(f"map vocabulary limited to {MAP_VOCAB_SLOTS} slots")
        if self.entries is None:
            object.__setattr__(self, "entries", tuple(_build_entries(self.map_vocabulary)))

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, index: int) -> FeatureEntry:
        return self.entries[index]

    @property
    def n_in_game(self) -> int:
        return IN_GAME_WIDTH

    @property
    def n_pre_game(self) -> int:
        return PRE_GAME_WIDTH

    def indices_for_groups(self, groups) -> list[int]:
        wanted = set(groups)
        return [e.index for e in self.entries if e.group in wanted]

    def map_slot(self, map_name: str) -> int:
        """One-hot slot for a map; unseen maps share the reserved slot."""
        try:
            return self.map_vocabulary.index(map_name)
        except ValueError:
            return MAP_VOCAB_SLOTS

    def to_document(self) -> dict:
        return {
            "total": len(self.entries),
            "in_game": self.n_in_game,
            "pre_game": self.n_pre_game,
            "map_vocabulary": list(self.map_vocabulary),
            "features": [
                {
                    "index": e.index,
                    "name": e.name,
                    "group": e.group,
                    "phrase": e.phrase,
                    "skill": e.skill,
                    "window": e.window,
                    "statistic": e.statistic,
                    "team": e.team,
                    "aggregation": e.aggregation,
                }
                for e in self.entries
            ],
        }


def _build_entries(map_vocabulary) -> list[FeatureEntry]:
    entries: list[FeatureEntry] = []

    def add(name, group, phrase, **kw):
        entries.append(FeatureEntry(index=len(entries), name=name, group=group, phrase=phrase, **kw))

    add("date_days", "date", "days since the start of the dataset")
    slots = list(map_vocabulary) + [OTHER_MAP] * (MAP_VOCAB_SLOTS + 1 - len(map_vocabulary))
    for i, map_name in enumerate(slots):
        if map_name == OTHER_MAP:
            add(f"map_slot{i}_other", "map", "played on a map outside the vocabulary")
        else:
            add(f"map_{map_name}", "map", f"played on {map_name}")
    for team in ("team1", "team2"):
        for side in ("ct", "t"):
            add(
                f"score_h1_{team}_{side}",
                "score",
                f"first-half rounds won by {'team 1' if team == 'team1' else 'team 2'} on the {side.upper()} side",
                team=team,
            )
    for team in ("team1", "team2"):
        label = "team 1" if team == "team1" else "team 2"
        add(f"rank_{team}", "rank", f"HLTV rank of {label}", team=team)
    for team in ("team1", "team2"):
        label = "team 1" if team == "team1" else "team 2"
        for scope, scope_phrase in (("map", "on this map"), ("all", "across all maps")):
            for skill in BASIC_SKILLS:
                agg = "sum" if skill in COUNT_SKILLS else "mean"
                add(
                    f"skill_{team}_{scope}_{skill}",
                    "team_skill",
                    f"{label} roster {_SKILL_PHRASES[skill]} {scope_phrase}",
                    skill=skill,
                    team=team,
                    aggregation=agg,
                )
    assert len(entries) == IN_GAME_WIDTH

    for skill in ALL_SKILLS:
        for window in WINDOW_NAMES:
            for stat in STAT_NAMES:
                agg = "sum" if skill in COUNT_SKILLS else "mean"
                add(
                    f"pre_{skill}_{window}w_{stat}",
                    "pre_game",
                    f"{_STAT_PHRASES[stat]} of {_SKILL_PHRASES[skill]} over the "
                    f"{_WINDOW_PHRASES[window]} (team 1 minus team 2)",
                    skill=skill,
                    window=window,
                    statistic=stat,
                    team="diff",
                    aggregation=agg,
                )
    assert len(entries) == TOTAL_WIDTH
    return entries


def build_map_vocabulary(map_names_in_chunk) -> tuple[str, ...]:
    """Vocabulary from the cold-start chunk: the most frequent maps, capped
    at the slot budget, stored alphabetically."""
    from collections import Counter

    counts = Counter(map_names_in_chunk)
    top = [name for name, _ in counts.most_common(MAP_VOCAB_SLOTS)]
    return tuple(sorted(top))
