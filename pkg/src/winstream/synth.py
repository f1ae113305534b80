"""Seeded replica dataset generator.

Produces a players file and a results file in the exact schema the loaders
expect, calibrated so the headline dataset statistics land on the published
reference values: raw and date-filtered row counts, winner class counts,
the cold-start games-per-player distribution (window config 12/2/3/9 at
paper scale), and planted rare maps whose one-hot variances set the
scenario-A selection threshold near 0.004.

Matches are simulated from latent player skill (an aim axis and a utility
axis): first-half scores, HLTV ranks and skill lines all derive from the
same latents.  The win probability mixes a first-half term, a base-strength
term and a sign interaction between the two axes whose polarity flips
across eras; the interaction is invisible to per-feature Gaussian marginals
but easy for threshold learners, reproducing the published separation
between the naive-Bayes baseline and the tree models.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.special import ndtr

from . import schema

GENERATOR_VERSION = 22

COMMON_MAPS = ("dust2", "inferno", "mirage", "nuke")
RARE_MAPS = ("cache", "overpass", "train")  # planted sparse in the chunk
LATE_MAP = "vertigo"  # appears after the cold-start chunk only
EPOCH = dt.date(2017, 1, 3)

# win-model coefficients (logit scale)
B0 = 0.21
W_H1 = 3.50
W_BASE = 1.20
W_XOR = 3.00
W_SIDE = 1.20
MAP_BIAS_SD = 0.10
H1_NOISE_SD = 1.90
RANK_NOISE_SD = 8.0


@dataclass
class ReplicaSpec:
    seed: int = 20250810
    n_games_kept: int = 45_079
    n_games_dropped: int = 694
    class_counts: tuple = (24_236, 20_843)
    n_players: int = 12_153
    p_rows_kept: int = 376_469
    p_rows_dropped: int = 6_848
    cold_fraction: float = 0.10
    bo3_matches_post: int = 4_800
    kept_days: int = 1_096
    dropped_days: int = 40
    rare_chunk_counts: tuple = (14, 18, 22)
    paper_scale: bool = True
    era_breaks: tuple = (14_507, 24_507, 34_507)

    @property
    def n_chunk(self) -> int:
        return int(np.floor(self.cold_fraction * self.n_games_kept))


def small_replica_spec(n_games: int = 600, seed: int = 7) -> ReplicaSpec:
    """Scaled-down replica for fast tests and service fixtures."""
    chunk = n_games // 10
    post_games = n_games - chunk
    bo3 = max(1, post_games // 9)
    bo1 = post_games - 3 * bo3
    assert bo1 > 0
    n_matched = chunk + bo1 + bo3
    team1_wins = int(round(n_games * 0.5376))
    n_players = max(60, int(round(n_games / 3.709)))
    p_rows_kept = 10 * n_matched + 10 * max(2, n_games // 40)
    n_dropped = max(4, n_games // 65)
    d_bo2 = min(10, n_dropped // 60)
    return ReplicaSpec(
        seed=seed,
        n_games_kept=n_games,
        n_games_dropped=n_dropped,
        class_counts=(team1_wins, n_games - team1_wins),
        n_players=n_players,
        p_rows_kept=p_rows_kept,
        p_rows_dropped=10 * (n_dropped - d_bo2) + 8,
        bo3_matches_post=bo3,
        kept_days=max(30, n_games // 40),
        dropped_days=6,
        rare_chunk_counts=(1, 2, 3),
        paper_scale=False,
        era_breaks=(n_games // 3, 2 * n_games // 3),
    )


# --------------------------------------------------------------------- quota


def _chunk_quota_multiset(n_matches: int, paper_scale: bool, rng) -> np.ndarray:
    """Games-per-player counts for the cold-start chunk.

    At paper scale the bucket construction pins mean ~12 and quartiles
    (2, 3, 9) under the rounded-index percentile rule.
    """
    slots = 10 * n_matches
    if paper_scale:
        buckets = [(1, 750), (2, 600), (3, 750), (4, 300), (5, 150),
                   (6, 100), (7, 80), (8, 70), (9, 70)]
        tail_players = 886
    else:
        n_players = max(12, int(round(slots / 12.0)))
        fracs = [(1, 0.1997), (2, 0.1597), (3, 0.1997), (4, 0.0799), (5, 0.0399),
                 (6, 0.0266), (7, 0.0213), (8, 0.0186), (9, 0.0186)]
        buckets = [(games, max(1, int(round(f * n_players)))) for games, f in fracs]
        tail_players = max(2, n_players - sum(c for _, c in buckets))
    counts = []
    for games, n in buckets:
        counts.extend([games] * n)
    fixed = sum(counts)
    tail_total = slots - fixed
    base = 10
    if not paper_scale:
        # tiny chunks: widen the tail population until it can hold the
        # remaining slots under the one-appearance-per-match cap
        feasible = int(np.ceil(tail_total / max(n_matches - 1, 1)))
        tail_players = max(tail_players, feasible, 2)
        tail_players = min(tail_players, max(tail_total // base, 2))
    assert tail_total >= base * tail_players, "tail cannot absorb remaining slots"
    weights = 1.0 / np.arange(1, tail_players + 1) ** 0.7
    extra = np.floor(weights / weights.sum() * (tail_total - base * tail_players)).astype(int)
    tail = base + extra
    residue = tail_total - int(tail.sum())
    tail[:residue] += 1  # largest-weight entries absorb the rounding residue
    cap = n_matches - 1
    assert cap * len(tail) >= tail_total, "tail cannot fit under the per-match cap"
    while (tail > cap).any():
        for i in range(len(tail)):
            if tail[i] > cap:
                overflow = int(tail[i] - cap)
                tail[i] = cap
                tail[(i + 1) % len(tail)] += overflow
    counts.extend(int(t) for t in tail)
    counts = np.array(counts)
    assert counts.sum() == slots
    return counts


def _schedule_groups(quotas: np.ndarray, player_ids: np.ndarray, group_sizes: list[int], rng):
    """Shuffle per-player tickets into groups, then repair duplicates by
    swapping across groups."""
    tickets = np.repeat(player_ids, quotas)
    rng.shuffle(tickets)
    groups, pos = [], 0
    for size in group_sizes:
        groups.append(tickets[pos : pos + size].copy())
        pos += size
    assert pos == len(tickets)
    n = len(groups)
    for i in range(n):
        row = groups[i]
        guard = 0
        while len(set(row)) < len(row):
            guard += 1
            if guard > 100_000:
                raise RuntimeError("duplicate repair failed to converge")
            seen: set = set()
            dup_j = next(j for j, v in enumerate(row) if v in seen or seen.add(v))
            row_set = set(row)
            while True:
                r = int(rng.integers(0, n))
                if r == i:
                    continue
                c = int(rng.integers(0, len(groups[r])))
                v2 = groups[r][c]
                if v2 in row_set or row[dup_j] in set(groups[r]):
                    continue
                groups[r][c], row[dup_j] = row[dup_j], v2
                break
    return groups


def _post_chunk_quotas(n_players: int, chunk_quotas: np.ndarray, total_slots: int, rng):
    """Appearance counts after the chunk: veterans continue with tempered
    weight, newcomers join on a long tail, everyone appears at least once."""
    n_chunk_players = len(chunk_quotas)
    n_new = n_players - n_chunk_players
    assert n_new >= 0, "player budget smaller than the chunk population"
    weights = np.concatenate([
        chunk_quotas.astype(float) ** 0.85,
        (1.0 / np.arange(1, n_new + 1) ** 0.85) * rng.uniform(0.8, 1.2, n_new) * 30.0,
    ])
    raw = weights / weights.sum() * total_slots
    counts = np.maximum(1, np.floor(raw)).astype(int)
    diff = total_slots - int(counts.sum())
    order = np.argsort(-raw)
    i = 0
    while diff != 0:
        j = order[i % len(order)]
        if diff > 0:
            counts[j] += 1
            diff -= 1
        elif counts[j] > 1:
            counts[j] -= 1
            diff += 1
        i += 1
    return counts


# --------------------------------------------------------------------- skills


def _skill_frame(rng, aim, util, won):
    """Overall per-match skill line given latent axes and the match result.

    Counts are per-map averages so best-of-threes stay on one scale.
    """
    n = len(aim)
    won_c = won - 0.5
    # shared "form day" factor: one draw per player-match correlating every
    # skill line, so window statistics carry strongly redundant evidence
    shared = rng.normal(0, 1.0, n)
    perf = 0.5 * (aim + util) + 0.35 * shared + rng.normal(0, 0.22, n)
    rating = 0.70 + 0.15 * perf + 0.07 * won_c + rng.normal(0, 0.047, n)
    adr = 76 + 16 * aim + 6 * util + 7 * shared + 10 * won_c + rng.normal(0, 5, n)
    nk = rng.poisson(np.exp(np.log(14) + 0.32 * aim + 0.08 * util + 0.14 * shared + 0.18 * won_c))
    nd = rng.poisson(np.exp(np.log(15) - 0.18 * aim - 0.05 * util - 0.10 * shared - 0.10 * won_c))
    prakst = np.clip(69 + 5.5 * aim + 5.5 * util + 3.5 * shared + 4 * won_c + rng.normal(0, 3.2, n), 0, 100)
    nass = rng.poisson(np.exp(np.log(3.4) + 0.30 * util + 0.12 * shared + 0.05 * won_c))
    nfa = rng.poisson(np.exp(np.log(0.9) + 0.45 * util + 0.12 * shared))
    nhs = rng.binomial(np.maximum(nk, 0), np.clip(0.42 + 0.06 * aim, 0.05, 0.95))
    fkfd = np.round(rng.normal(1.6 * aim + 0.9 * shared + 0.4 * won_c - 0.2, 1.5)).astype(int)
    return {
        "adr": np.maximum(adr, 0.0).round(1),
        "deaths": nd,
        "kast": prakst.round(1),
        "kills": nk,
        "kddiff": nk - nd,
        "rating": np.maximum(rating, 0.0).round(2),
        "assists": nass,
        "flash_assists": nfa,
        "hs": nhs,
        "fkdiff": fkfd,
    }


_SIDE_BASE = ("kills", "deaths", "kddiff", "adr", "kast", "rating")


def _side_columns(rng, overall):
    """Side-scoped basics around the overall line with CT drift and noise."""
    n = len(overall["adr"])
    out = {}
    ct_bias = {"kills": 0.6, "deaths": -0.5, "kddiff": 1.1, "adr": 2.0, "kast": 1.2, "rating": 0.02}
    scale = {"kills": 2.2, "deaths": 2.0, "kddiff": 2.6, "adr": 6.0, "kast": 4.0, "rating": 0.038}
    for col in _SIDE_BASE:
        base = overall[col].astype(float)
        for side in ("ct", "t"):
            sgn = 1.0 if side == "ct" else -1.0
            vals = base + sgn * ct_bias[col] + rng.normal(0, scale[col], n)
            if col in ("kills", "deaths", "rating"):
                vals = np.maximum(vals, 0.0)
            if col == "kast":
                vals = np.clip(vals, 0, 100)
            out[f"{col}_{side}"] = vals.round(2)
    return out


# ----------------------------------------------------------------- generator


@dataclass
class _MatchPlan:
    n_games: int
    kept: bool
    is_chunk: bool
    players: np.ndarray = field(default=None)  # type: ignore[assignment]
    games: list = field(default_factory=list)


def generate_replica(spec: ReplicaSpec, out_dir) -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)

    n_chunk = spec.n_chunk
    post_games = spec.n_games_kept - n_chunk
    bo3 = spec.bo3_matches_post
    bo1 = post_games - 3 * bo3
    assert bo1 > 0, "post-chunk best-of mix infeasible"

    plans: list[_MatchPlan] = [
        _MatchPlan(n_games=1, kept=True, is_chunk=True) for _ in range(n_chunk)
    ]
    post_kinds = np.array([1] * bo1 + [3] * bo3)
    rng.shuffle(post_kinds)
    plans += [_MatchPlan(n_games=int(k), kept=True, is_chunk=False) for k in post_kinds]
    d_bo2 = min(10, max(0, spec.n_games_dropped // 60))
    d_bo1 = spec.n_games_dropped - 2 * d_bo2
    plans += [_MatchPlan(n_games=k, kept=False, is_chunk=False) for k in [1] * d_bo1 + [2] * d_bo2]

    kept_matched = [p for p in plans if p.kept]
    dropped_matched = [p for p in plans if not p.kept]
    assert sum(p.n_games for p in kept_matched) == spec.n_games_kept
    assert sum(p.n_games for p in dropped_matched) == spec.n_games_dropped

    # ---------------- player scheduling
    chunk_quotas = _chunk_quota_multiset(n_chunk, spec.paper_scale, rng)
    n_chunk_players = len(chunk_quotas)
    chunk_groups = _schedule_groups(chunk_quotas, np.arange(n_chunk_players), [10] * n_chunk, rng)

    matched_rows_kept = 10 * len(kept_matched)
    orphan_rows = spec.p_rows_kept - matched_rows_kept
    assert orphan_rows >= 0, "negative orphan rows: adjust spec arithmetic"
    orphan_groups_full, orphan_rem = divmod(orphan_rows, 10)
    post_matched_groups = len(kept_matched) - n_chunk
    post_slots = 10 * post_matched_groups + orphan_rows
    post_quotas = _post_chunk_quotas(spec.n_players, chunk_quotas, post_slots, rng)
    group_sizes = [10] * (post_matched_groups + orphan_groups_full)
    if orphan_rem:
        group_sizes.append(orphan_rem)
    post_groups = _schedule_groups(post_quotas, np.arange(spec.n_players), group_sizes, rng)
    post_match_groups = post_groups[:post_matched_groups]
    orphan_group_list = post_groups[post_matched_groups:]

    post_plans = [p for p in kept_matched if not p.is_chunk]
    for plan, grp in zip(plans[:n_chunk], chunk_groups):
        plan.players = grp
    for plan, grp in zip(post_plans, post_match_groups):
        plan.players = grp
    for plan in dropped_matched:
        plan.players = rng.choice(spec.n_players, size=10, replace=False)

    # ---------------- latents
    aim = rng.normal(0, 1, spec.n_players)
    util = rng.normal(0, 1, spec.n_players)

    # ---------------- map assignment for kept games
    kept_maps = np.empty(spec.n_games_kept, dtype=object)
    chunk_idx = np.arange(n_chunk)
    rng.shuffle(chunk_idx)
    pos = 0
    for rare_map, count in zip(RARE_MAPS, spec.rare_chunk_counts):
        kept_maps[chunk_idx[pos : pos + count]] = rare_map
        pos += count
    common_probs = np.array([0.33, 0.30, 0.2765, 0.0935])
    kept_maps[chunk_idx[pos:]] = rng.choice(COMMON_MAPS, size=n_chunk - pos, p=common_probs)
    post_pool = list(COMMON_MAPS) + list(RARE_MAPS) + [LATE_MAP]
    post_probs = np.array([0.24, 0.22, 0.20, 0.12, 0.06, 0.05, 0.05, 0.06])
    kept_maps[n_chunk:] = rng.choice(post_pool, size=post_games, p=post_probs)

    era_breaks = list(spec.era_breaks)
    n_eras = len(era_breaks) + 1
    map_bias = {(m, e): rng.normal(0, MAP_BIAS_SD) for m in post_pool for e in range(n_eras)}
    xor_polarity = [1 if e % 2 == 0 else -1 for e in range(n_eras)]
    slot_polarity = [1 if e % 2 == 0 else -1 for e in range(n_eras)]

    def era_of(game_index: int) -> int:
        for e, b in enumerate(era_breaks):
            if game_index < b:
                return e
        return n_eras - 1

    # ---------------- simulate games
    all_games: list[dict] = []
    game_index = 0
    event_seq, match_seq, team_seq = 10_000, 2_000_000, 5_000
    for plan in plans:
        players = plan.players
        t1, t2 = players[:5], players[5:]
        a1, u1 = aim[t1].mean(), util[t1].mean()
        a2, u2 = aim[t2].mean(), util[t2].mean()
        d_aim, d_util = a1 - a2, u1 - u2
        d_base = 0.5 * (d_aim + d_util)
        s1, s2 = 0.5 * (a1 + u1), 0.5 * (a2 + u2)

        event_seq += 1
        match_seq += 1
        team1_id = team_seq + int(rng.integers(0, 1400))
        team2_id = team1_id + 1 + int(rng.integers(0, 1399))
        def draw_rank(s):
            if rng.random() < 0.08:  # unranked teams report the bottom rank
                return 300
            return int(np.clip(np.round(150 * (1 - ndtr(s / 0.32)) + rng.normal(0, RANK_NOISE_SD)), 1, 300))

        rank1 = draw_rank(s1)
        rank2 = draw_rank(s2)

        if plan.kept:
            maps = [str(kept_maps[game_index + k]) for k in range(plan.n_games)]
        else:
            maps = [str(m) for m in rng.choice(post_pool, size=plan.n_games, replace=False)]
        deduped = list(dict.fromkeys(maps))
        while len(deduped) < plan.n_games:
            extra = str(rng.choice(post_pool))
            if extra not in deduped:
                deduped.append(extra)
        maps = deduped

        for k in range(plan.n_games):
            era = era_of(game_index if plan.kept else spec.n_games_kept)
            h1_t1 = int(np.clip(np.round(7.5 + 4.5 * d_base + rng.normal(0, H1_NOISE_SD)), 0, 15))
            h1_dev = (h1_t1 - 7.5) / 3.2
            starting_ct = int(rng.integers(1, 3))
            side_sign = 1.0 if starting_ct == 1 else -1.0  # +1: team1 opened on T
            eta = (
                B0 * slot_polarity[era]
                + (W_H1 + W_SIDE * side_sign * -1.0) * h1_dev
                + W_BASE * d_base
                + W_XOR * xor_polarity[era] * np.tanh(3 * d_aim) * np.tanh(3 * d_util)
                + map_bias[(maps[k], era)]
            )
            rec = {
                "map": maps[k],
                "h1_t1": h1_t1,
                "eta": float(eta),
                "team1_wins": bool(rng.random() < 1.0 / (1.0 + np.exp(-eta))),
                "event_id": event_seq,
                "match_id": match_seq,
                "team1_id": team1_id,
                "team2_id": team2_id,
                "rank1": rank1,
                "rank2": rank2,
                "kept": plan.kept,
                "game_index": game_index if plan.kept else None,
                "starting_ct": starting_ct,
            }
            plan.games.append(rec)
            all_games.append(rec)
            if plan.kept:
                game_index += 1
    assert game_index == spec.n_games_kept

    # ---------------- exact class-count repair on kept games
    kept_records = [r for r in all_games if r["kept"]]
    wins = np.array([r["team1_wins"] for r in kept_records])
    etas = np.array([r["eta"] for r in kept_records])
    delta = int(wins.sum()) - spec.class_counts[0]
    if delta > 0:
        candidates = np.where(wins)[0]
        for i in candidates[np.argsort(np.abs(etas[candidates]))[:delta]]:
            kept_records[i]["team1_wins"] = False
    elif delta < 0:
        candidates = np.where(~wins)[0]
        for i in candidates[np.argsort(np.abs(etas[candidates]))[: -delta]]:
            kept_records[i]["team1_wins"] = True
    assert sum(r["team1_wins"] for r in kept_records) == spec.class_counts[0]

    # ---------------- dates
    kept_dates = [
        EPOCH + dt.timedelta(days=int(i * spec.kept_days / spec.n_games_kept))
        for i in range(spec.n_games_kept)
    ]
    cutoff = EPOCH + dt.timedelta(days=spec.kept_days - 1)
    assert kept_dates[-1] <= cutoff

    # ---------------- emit result rows
    results_rows = []
    match_outcomes: dict[int, list] = {}
    dropped_cursor = 0
    for rec in all_games:
        if rec["kept"]:
            date = kept_dates[rec["game_index"]]
        else:
            date = cutoff + dt.timedelta(
                days=1 + int(dropped_cursor * max(spec.dropped_days - 1, 1) / max(spec.n_games_dropped, 1))
            )
            dropped_cursor += 1
        rec["date"] = date
        team1_wins = rec["team1_wins"]
        h1_t1 = rec["h1_t1"]
        h1_t2 = 15 - h1_t1
        w_h1, l_h1 = (h1_t1, h1_t2) if team1_wins else (h1_t2, h1_t1)
        closeness = float(np.clip(0.45 - 0.08 * abs(rec["eta"]), 0.05, 0.9))
        l_h2 = int(rng.binomial(max(14 - l_h1, 0), closeness))
        w_h2 = 16 - w_h1
        t1_h1, t2_h1 = h1_t1, h1_t2
        t1_h2 = w_h2 if team1_wins else l_h2
        t2_h2 = l_h2 if team1_wins else w_h2
        t1_total, t2_total = t1_h1 + t1_h2, t2_h1 + t2_h2
        assert (t1_total > t2_total) == team1_wins
        starting_ct = rec["starting_ct"]
        if starting_ct == 1:
            ct_1, t_1 = t1_h1, t1_h2
            t_2, ct_2 = t2_h1, t2_h2
        else:
            t_1, ct_1 = t1_h1, t1_h2
            ct_2, t_2 = t2_h1, t2_h2
        winner = 1 if team1_wins else 2
        match_outcomes.setdefault(rec["match_id"], []).append(winner)
        sofar = match_outcomes[rec["match_id"]]
        results_rows.append({
            "date": date.isoformat(),
            "team_1": rec["team1_id"],
            "team_2": rec["team2_id"],
            "_map": rec["map"],
            "result_1": t1_total,
            "result_2": t2_total,
            "map_winner": winner,
            "starting_ct": starting_ct,
            "ct_1": ct_1,
            "t_2": t_2,
            "t_1": t_1,
            "ct_2": ct_2,
            "event_id": rec["event_id"],
            "match_id": rec["match_id"],
            "rank_1": rec["rank1"],
            "rank_2": rec["rank2"],
            "map_wins_1": sofar.count(1),
            "map_wins_2": sofar.count(2),
            "match_winner": 1 if sofar.count(1) >= sofar.count(2) else 2,
        })

    results = pd.DataFrame(results_rows)
    assert len(results) == spec.n_games_kept + spec.n_games_dropped

    # ---------------- player rows
    all_cols = (
        list(schema.PLAYER_META_COLUMNS)
        + list(schema.PLAYER_OVERALL_COLUMNS)
        + list(schema.player_side_columns())
        + list(schema.player_map_side_columns())
    )
    p_rows: dict[str, list] = {col: [] for col in all_cols}
    countries = ["SE", "DK", "FR", "US", "BR", "UA", "PL", "DE", "FI", "KZ"]

    def emit_rows(players, date, event_id, match_id, team_ids, opp_ids, best_of,
                  maps, overall, sides, map_blocks):
        n = len(players)
        p_rows["date"].extend([date.isoformat()] * n)
        p_rows["player_name"].extend([f"player_{p}" for p in players])
        p_rows["team"].extend(team_ids)
        p_rows["opponent"].extend(opp_ids)
        p_rows["country"].extend((countries * 2)[:n])
        p_rows["player_id"].extend((1_000_000 + np.asarray(players)).tolist())
        p_rows["match_id"].extend([match_id] * n)
        p_rows["event_id"].extend([event_id] * n)
        p_rows["event_name"].extend([f"event_{event_id}"] * n)
        p_rows["best_of"].extend([best_of] * n)
        for k in (1, 2, 3):
            p_rows[f"map_{k}"].extend([maps[k - 1] if k <= len(maps) else ""] * n)
        for col in schema.PLAYER_OVERALL_COLUMNS:
            p_rows[col].extend(np.asarray(overall[col]).tolist())
        for col in schema.player_side_columns():
            p_rows[col].extend(np.asarray(sides[col]).tolist())
        for k in (1, 2, 3):
            block = map_blocks[k - 1] if k <= len(map_blocks) else None
            for col_base in _SIDE_BASE:
                for side in ("ct", "t"):
                    col = f"m{k}_{col_base}_{side}"
                    if block is None:
                        p_rows[col].extend([0.0] * n)
                    else:
                        p_rows[col].extend(np.asarray(block[f"{col_base}_{side}"]).tolist())

    for plan in plans:
        first = plan.games[0]
        players = plan.players
        won_team1 = float(np.mean([1.0 if r["team1_wins"] else 0.0 for r in plan.games]))
        won = np.where(np.arange(10) < 5, won_team1, 1.0 - won_team1)
        overall = _skill_frame(rng, aim[players], util[players], won)
        sides = _side_columns(rng, overall)
        maps = [r["map"] for r in plan.games]
        map_blocks = [_side_columns(rng, overall) for _ in maps]
        team_ids = [first["team1_id"]] * 5 + [first["team2_id"]] * 5
        opp_ids = [first["team2_id"]] * 5 + [first["team1_id"]] * 5
        emit_rows(players, first["date"], first["event_id"], first["match_id"],
                  team_ids, opp_ids, plan.n_games, maps, overall, sides, map_blocks)

    # orphan rows: player lines without matching result games
    orphan_event, orphan_match = 90_000, 9_000_000
    post_dates = kept_dates[n_chunk:]
    for grp in orphan_group_list:
        orphan_event += 1
        orphan_match += 1
        n = len(grp)
        date = post_dates[int(rng.integers(0, len(post_dates)))]
        overall = _skill_frame(rng, aim[grp], util[grp], np.full(n, 0.5))
        sides = _side_columns(rng, overall)
        map_name = str(rng.choice(post_pool))
        team_id = team_seq + int(rng.integers(0, 1400))
        emit_rows(grp, date, orphan_event, orphan_match,
                  [team_id] * min(5, n) + [team_id + 7] * max(n - 5, 0),
                  [team_id + 7] * min(5, n) + [team_id] * max(n - 5, 0),
                  1, [map_name], overall, sides, [sides])

    # stray dropped rows (dated after the cutoff)
    stray = spec.p_rows_dropped - 10 * len(dropped_matched)
    assert stray >= 0
    if stray:
        grp = rng.choice(spec.n_players, size=stray, replace=False)
        overall = _skill_frame(rng, aim[grp], util[grp], np.full(stray, 0.5))
        sides = _side_columns(rng, overall)
        orphan_event += 1
        orphan_match += 1
        emit_rows(grp, cutoff + dt.timedelta(days=2), orphan_event, orphan_match,
                  [4999] * stray, [4998] * stray, 1, ["dust2"], overall, sides, [sides])

    players_frame = pd.DataFrame(p_rows)
    expected_rows = spec.p_rows_kept + spec.p_rows_dropped
    assert len(players_frame) == expected_rows, (len(players_frame), expected_rows)

    players_frame.to_csv(out_dir / "players.csv", index=False)
    results.to_csv(out_dir / "results.csv", index=False)

    meta = {
        "generator_version": GENERATOR_VERSION,
        "seed": spec.seed,
        "cutoff": cutoff.isoformat(),
        "epoch": EPOCH.isoformat(),
        "n_results_rows": len(results),
        "n_players_rows": len(players_frame),
        "kept_results": spec.n_games_kept,
        "kept_players_rows": spec.p_rows_kept,
        "class_counts": list(spec.class_counts),
        "n_distinct_players": spec.n_players,
        "era_breaks": list(spec.era_breaks),
        "maps": {"common": list(COMMON_MAPS), "rare": list(RARE_MAPS), "late": LATE_MAP},
        "paper_scale": spec.paper_scale,
    }
    (out_dir / "meta.json").write_text(json.dumps(meta, indent=2))
    return meta


def replica_cache_dir(root, spec: ReplicaSpec) -> Path:
    tag = "paper" if spec.paper_scale else f"small{spec.n_games_kept}"
    return Path(root) / f"replica_v{GENERATOR_VERSION}_{tag}_seed{spec.seed}"


def ensure_replica(root, spec: ReplicaSpec) -> Path:
    """Generate the replica once and reuse it across runs."""
    out = replica_cache_dir(root, spec)
    meta_file = out / "meta.json"
    if meta_file.exists():
        try:
            meta = json.loads(meta_file.read_text())
            if meta.get("generator_version") == GENERATOR_VERSION and meta.get("seed") == spec.seed:
                return out
        except (json.JSONDecodeError, OSError):
            pass
    generate_replica(spec, out)
    return out
