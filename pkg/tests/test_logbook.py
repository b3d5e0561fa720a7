"""Log files and the statistics fold over them."""

import json

import pytest
from conftest import make_config

from thea.games import GodaiMode
from thea.gestures import GameKind
from thea.logbook import (LogStore, Play, parse_log_text, plays_in, read_log,
                          stats_for_player)
from thea.runner import run_session


def finished_session(tmp_path, name, **kw):
    cfg = make_config(**kw)
    store = LogStore(tmp_path)
    runtime = run_session(cfg, out_path=store.path_for(name))
    return store, runtime


# -- files ---------------------------------------------------------------------

def test_written_file_round_trips_to_the_in_memory_log(tmp_path):
    store, runtime = finished_session(tmp_path, "s1", seed=42)
    header, records = read_log(store.path_for("s1"))
    assert header == json.loads(runtime.log.lines[0])
    assert records == runtime.log.records


def test_parse_rejects_foreign_text():
    with pytest.raises(ValueError):
        parse_log_text('{"format": "other/1"}')
    with pytest.raises(ValueError):
        parse_log_text("")


def test_torn_or_foreign_files_are_skipped_not_fatal(tmp_path):
    store, _ = finished_session(tmp_path, "good", seed=1)
    (tmp_path / "torn.jsonl").write_text('{"format": "thea-log/1", "conf')
    (tmp_path / "foreign.jsonl").write_text('{"hello": 1}\n')
    assert len(store.all_logs()) == 1


# -- play extraction -----------------------------------------------------------

def test_one_completed_match_is_one_play(tmp_path):
    store, runtime = finished_session(tmp_path, "s1", seed=42)
    header, records = read_log(store.path_for("s1"))
    plays = plays_in(header, records)
    assert len(plays) == 1
    assert plays[0].game == "godai"
    assert plays[0].duration_ms > 0


def test_play_duration_equals_breathing_to_terminal_round():
    runtime = run_session(make_config(seed=42))
    header, records = parse_log_text(runtime.log.text())
    (play,) = plays_in(header, records)
    start = next(r["t_ms"] for r in records
                 if r["kind"] == "phase_changed"
                 and r["detail"]["to"] == "breathing")
    end = max(r["t_ms"] for r in records if r["kind"] == "round_resolved")
    assert (play.started_ms, play.ended_ms) == (start, end)


def test_abandoned_session_yields_no_plays():
    runtime = run_session(make_config(seed=5),
                          script_text="0 start\n4000 voice stop\n")
    header, records = parse_log_text(runtime.log.text())
    assert plays_in(header, records) == []


def test_epta_win_counts_as_a_play():
    cfg = make_config(game=GameKind.EPTA, mode=GodaiMode.FREE_PLAY, seed=9)
    runtime = run_session(cfg, max_ms=3_600_000)
    header, records = parse_log_text(runtime.log.text())
    plays = plays_in(header, records)
    assert plays and all(p.game == "epta" for p in plays)


# -- the fold -------------------------------------------------------------------

def test_stats_fold_matches_an_independent_fold(tmp_path):
    store = LogStore(tmp_path)
    seeds = (42, 43, 44)
    for seed in seeds:
        run_session(make_config(seed=seed),
                    out_path=store.path_for(f"s{seed}"))
    summary = store.stats("ayu")

    # Re-derive with a from-scratch pass over raw lines.
    count = 0
    total = 0
    for path in tmp_path.glob("*.jsonl"):
        rows = [json.loads(ln) for ln in path.read_text().splitlines()]
        start = None
        for row in rows[1:]:
            if row["kind"] == "phase_changed" and row["detail"].get("to") == "breathing":
                start = row["t_ms"]
            if row["kind"] == "round_resolved":
                inner = row["detail"].get("detail", {})
                if inner.get("match_over"):
                    count += 1
                    total += row["t_ms"] - start
    assert summary["sessions"] == len(seeds)
    assert summary["games"]["godai"] == {"count": count, "total_ms": total}
    assert summary["games"]["epta"] == {"count": 0, "total_ms": 0}


def test_stats_for_unknown_nickname_is_all_zero(tmp_path):
    store, _ = finished_session(tmp_path, "s1", seed=1)
    summary = store.stats("nobody")
    assert summary["sessions"] == 0
    assert all(v == {"count": 0, "total_ms": 0}
               for v in summary["games"].values())


def test_both_nicknames_see_the_shared_session(tmp_path):
    store, _ = finished_session(tmp_path, "s1", seed=1,
                                nicknames=("ayu", "bren"))
    assert store.stats("ayu")["sessions"] == 1
    assert store.stats("bren")["sessions"] == 1


def test_play_dataclass_duration():
    assert Play("godai", 1000, 61_000).duration_ms == 60_000


def test_stats_accept_plain_iterables():
    runtime = run_session(make_config(seed=2))
    parsed = parse_log_text(runtime.log.text())
    summary = stats_for_player([parsed], "ayu")
    assert summary["sessions"] == 1
    assert summary["games"]["godai"]["count"] == 1
