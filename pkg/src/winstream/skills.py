"""Skill vocabulary shared by ingestion, fusion and the window engine.

A skill vector is stored as a plain ``dict[str, float]`` keyed by the names
below.  Count-like skills aggregate across a five-player roster by summing,
rate-like skills by averaging; that split keeps each skill's semantics when
moving from player to team level.
"""

from __future__ import annotations

# Basic skills: tracked overall, by side, by map-and-side (and, after half
# reassignment, by half and by map-and-half).
BASIC_SKILLS = ("adr", "nd", "prakst", "nk", "kd_diff", "rating")

# Advanced skills: tracked overall only.
ADVANCED_SKILLS = ("nass", "nfa", "nhs", "fkfd_diff")

# The ten raw skills the window engine consumes, in manifest order.
ALL_SKILLS = BASIC_SKILLS + ADVANCED_SKILLS

# Aggregation rule across a 5-player roster.
COUNT_SKILLS = frozenset({"nd", "nk", "nass", "nfa", "nhs"})
RATE_SKILLS = frozenset({"adr", "prakst", "rating", "kd_diff", "fkfd_diff"})

SIDES = ("ct", "t")
HALVES = (1, 2)


def aggregate_roster(values_by_player: list[float], skill: str) -> float:
    """Collapse one skill across roster members: sum counts, average rates."""
    if skill in COUNT_SKILLS:
        return float(sum(values_by_player))
    return float(sum(values_by_player)) / len(values_by_player)


def empty_skill_vector(names=ALL_SKILLS) -> dict[str, float]:
    return {name: 0.0 for name in names}
