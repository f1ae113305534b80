import datetime as dt
from pathlib import Path

import pandas as pd
import pytest

from winstream import schema
from winstream.ingest import (
    DatasetError,
    filter_by_date,
    load_matches,
    load_players,
    recover_cutoff,
)
from winstream.records import assign_half_features
from winstream.synth import ReplicaSpec, generate_replica, small_replica_spec

FIXTURE_DIR = Path("/tmp/winstream_fixture_small")


@pytest.fixture(scope="module")
def small_files():
    spec = small_replica_spec(n_games=600, seed=7)
    meta = generate_replica(spec, FIXTURE_DIR)
    return spec, meta


def _results_header():
    return ",".join(schema.RESULTS_REQUIRED)


def _result_row(date="2020-01-05", team1=10, team2=20, ct_1=9, t_1=7, ct_2=6, t_2=8):
    r1, r2 = ct_1 + t_1, ct_2 + t_2
    return (
        f"{date},{team1},{team2},dust2,{r1},{r2},{1 if r1 > r2 else 2},1,"
        f"{ct_1},{t_2},{t_1},{ct_2},55,777,3,9,1,0,1"
    )


class TestLoadMatches:
    def test_small_replica_counts(self, small_files):
        spec, meta = small_files
        table = load_matches(FIXTURE_DIR / "results.csv")
        assert len(table) == meta["n_results_rows"]
        assert table.skipped == 0

    def test_missing_file(self):
        with pytest.raises(FileNotFoundError):
            load_matches("/tmp/definitely_not_here.csv")

    def test_header_mismatch(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("date,foo,bar\n2020-01-01,1,2\n")
        with pytest.raises(schema.SchemaMismatch):
            load_matches(bad)

    def test_empty_file_with_header(self, tmp_path):
        f = tmp_path / "empty.csv"
        f.write_text(_results_header() + "\n")
        table = load_matches(f)
        assert len(table) == 0 and table.skipped == 0

    def test_corrupted_row_skipped_and_counted(self, tmp_path):
        f = tmp_path / "three.csv"
        corrupt = _result_row().replace("2020-01-05", "not-a-date")
        f.write_text("\n".join([_results_header(), _result_row(), corrupt,
                                _result_row(date="2020-01-06")]) + "\n")
        table = load_matches(f)
        assert len(table) == 2
        assert table.skipped == 1

    def test_side_sum_violation_skipped(self, tmp_path):
        f = tmp_path / "sum.csv"
        bad = _result_row().replace(",16,14,", ",17,14,")  # result_1 != ct_1+t_1
        f.write_text("\n".join([_results_header(), bad]) + "\n")
        with pytest.raises(DatasetError):
            load_matches(f)

    def test_record_fields_and_winner(self, tmp_path):
        f = tmp_path / "one.csv"
        f.write_text("\n".join([_results_header(), _result_row()]) + "\n")
        table = load_matches(f)
        rec = table.record(0)
        assert rec.winner == 0  # 16 > 14
        assert rec.starting_ct_team == rec.team1_id
        assert rec.score_by_team_and_side[rec.team1_id] == {"ct": 9, "t": 7}
        halves = rec.score_by_team_and_half
        assert halves[rec.team1_id] == {1: 9, 2: 7}
        assert halves[rec.team2_id] == {1: 8, 2: 6}

    def test_stream_is_date_sorted(self, small_files):
        table = load_matches(FIXTURE_DIR / "results.csv")
        dates = table.frame["date"].tolist()
        assert all(a <= b for a, b in zip(dates, dates[1:]))


class TestLoadPlayers:
    def test_small_replica_counts(self, small_files):
        spec, meta = small_files
        table = load_players(FIXTURE_DIR / "players.csv")
        assert len(table) == meta["n_players_rows"]
        assert table.skipped == 0

    def test_record_materialisation(self, small_files):
        table = load_players(FIXTURE_DIR / "players.csv")
        rec = table.record(0)
        assert set(rec.skills_overall) == {
            "adr", "nd", "prakst", "nk", "kd_diff", "rating",
            "nass", "nfa", "nhs", "fkfd_diff",
        }
        assert 0 <= rec.skills_overall["prakst"] <= 100
        assert rec.skills_overall["kd_diff"] == rec.skills_overall["nk"] - rec.skills_overall["nd"]
        assert set(rec.skills_by_side) == {"ct", "t"}
        assert rec.maps  # at least one map slot filled
        assert not rec.has_half_features()


class TestFilterAndCutoff:
    def test_recovers_published_counts(self, small_files):
        spec, meta = small_files
        matches = load_matches(FIXTURE_DIR / "results.csv")
        players = load_players(FIXTURE_DIR / "players.csv")
        cutoff = recover_cutoff(matches, spec.n_games_kept)
        assert str(cutoff) == meta["cutoff"]
        fr = filter_by_date(matches, cutoff)
        fp = filter_by_date(players, cutoff)
        assert fr.n_retained == spec.n_games_kept
        assert fp.n_retained == spec.p_rows_kept

    def test_cutoff_before_all_dates_empty(self, small_files):
        matches = load_matches(FIXTURE_DIR / "results.csv")
        with pytest.raises(DatasetError):
            filter_by_date(matches, dt.date(1999, 1, 1))

    def test_cutoff_after_all_dates_identity(self, small_files):
        matches = load_matches(FIXTURE_DIR / "results.csv")
        out = filter_by_date(matches, dt.date(2099, 1, 1))
        assert out.n_retained == len(matches)
        assert out.n_dropped == 0

    def test_unreachable_target_raises(self, small_files):
        matches = load_matches(FIXTURE_DIR / "results.csv")
        with pytest.raises(DatasetError):
            recover_cutoff(matches, len(matches) + 5)


class TestAssignHalfFeatures:
    def _fixture(self, starting_ct_team1=True, tmp_path=None):
        mfile = tmp_path / "m.csv"
        row = _result_row() if starting_ct_team1 else _result_row().replace(",1,9,", ",2,9,")
        mfile.write_text("\n".join([_results_header(), row]) + "\n")
        match = load_matches(mfile).record(0)
        pg = None
        from winstream.records import PlayerGameRecord

        pg = PlayerGameRecord(
            date=match.date, event_id=match.event_id, game_id=match.game_id,
            team_id=match.team1_id, player_id="p1", maps=(match.map_name,),
            skills_overall={},
            skills_by_side={"ct": {"adr": 90.0}, "t": {"adr": 70.0}},
            skills_by_map_and_side={match.map_name: {"ct": {"adr": 91.0}, "t": {"adr": 71.0}}},
        )
        return match, pg

    def test_team_starting_ct(self, tmp_path):
        match, pg = self._fixture(True, tmp_path)
        out = assign_half_features(pg, match)
        assert out.skills_by_half[1] == {"adr": 90.0}
        assert out.skills_by_half[2] == {"adr": 70.0}
        assert out.skills_by_map_and_half[1] == {"adr": 91.0}

    def test_team_starting_t(self, tmp_path):
        match, pg = self._fixture(False, tmp_path)
        out = assign_half_features(pg, match)
        assert out.skills_by_half[1] == {"adr": 70.0}

    def test_overall_untouched(self, tmp_path):
        match, pg = self._fixture(True, tmp_path)
        out = assign_half_features(pg, match)
        assert out.skills_overall == pg.skills_overall

    def test_unresolvable_team(self, tmp_path):
        from dataclasses import replace

        match, pg = self._fixture(True, tmp_path)
        stranger = replace(pg, team_id="someone-else")
        with pytest.raises(KeyError):
            assign_half_features(stranger, match)
