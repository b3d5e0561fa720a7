"""Append-only session logs and the statistics fold over them.

One JSONL file per session.  The first line is a header carrying the full
config, the seed, the clock mode and the event script; every later line is
one record::

    {"seq": N, "t_ms": T, "session_id": S, "kind": K, "detail": {...}}

Records are append-only and strictly ordered by (t_ms, seq).  Everything
downstream — statistics, the live UI stream, replay verification — is a
fold over these lines and nothing else, so replaying a log reconstructs
the exact same numbers the live service reported.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Union

FORMAT = "thea-log/1"

# Record vocabulary. The core session kinds:
SESSION_STARTED = "session_started"
PHASE_CHANGED = "phase_changed"
GESTURE_SHOWN = "gesture_shown"
ROUND_RESOLVED = "round_resolved"
REVEAL_USED = "reveal_used"
PAUSED = "paused"
RESUMED = "resumed"
KILL_SWITCH = "kill_switch"
USAGE_LIMIT = "usage_limit"
SESSION_ENDED = "session_ended"
# ...plus full-fidelity trace kinds so a transcript captures every effect:
EFFECT = "effect"
ROUND_STARTED = "round_started"
GAME_COMPLETED = "game_completed"
INTENSITY_SET = "intensity_set"


def _compact(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class LogWriter:
    """Serializer for one session's records; optionally mirrored to a file."""

    def __init__(self, session_id: str, clock_mode: str, config: dict,
                 script_text: str, path: Union[str, Path, None] = None,
                 on_record: Optional[Callable[[dict], None]] = None,
                 extra_header: Optional[dict] = None) -> None:
        self.session_id = session_id
        self.records: list[dict] = []
        self.lines: list[str] = []
        self.on_record = on_record
        self._seq = 0
        self._file = None
        self.header = {
            "format": FORMAT,
            "session_id": session_id,
            "clock": clock_mode,
            "config": config,
            "script": script_text,
        }
        if extra_header:
            self.header.update(extra_header)
        self.lines.append(_compact(self.header))
        if path is not None:
            self._file = open(path, "w")
            self._file.write(self.lines[0] + "\n")
            self._file.flush()

    def append(self, t_ms: int, kind: str, detail: dict) -> dict:
        self._seq += 1
        record = {"seq": self._seq, "t_ms": t_ms,
                  "session_id": self.session_id, "kind": kind, "detail": detail}
        self.records.append(record)
        line = _compact(record)
        self.lines.append(line)
        if self._file is not None:
            self._file.write(line + "\n")
            self._file.flush()  # live stats fold over files as they grow
        if self.on_record is not None:
            self.on_record(record)
        return record

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def read_log(source: Union[str, Path]) -> tuple[dict, list[dict]]:
    """Load one session log. Returns (header, records)."""
    lines = Path(source).read_text().splitlines()
    return parse_log_text("\n".join(lines))


def parse_log_text(text: str) -> tuple[dict, list[dict]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty log")
    header = json.loads(lines[0])
    if header.get("format") != FORMAT:
        raise ValueError(f"not a {FORMAT} file")
    return header, [json.loads(ln) for ln in lines[1:]]


# -- statistics --------------------------------------------------------------

@dataclass(frozen=True)
class Play:
    """One completed game within a session."""

    game: str
    started_ms: int
    ended_ms: int

    @property
    def duration_ms(self) -> int:
        return self.ended_ms - self.started_ms


def _result_is_terminal(detail: dict) -> bool:
    inner = detail.get("detail", {})
    return bool(inner.get("match_over") or inner.get("complete")
                or inner.get("outcome") in ("won", "lost"))


def plays_in(header: dict, records: list[dict]) -> list[Play]:
    """Completed games: each terminal round closes the play opened by the
    most recent entry into the breathing phase."""
    game = header["config"]["game"]
    plays = []
    play_start = 0
    for rec in records:
        if rec["kind"] == PHASE_CHANGED and rec["detail"].get("to") == "breathing":
            play_start = rec["t_ms"]
        elif rec["kind"] == ROUND_RESOLVED and _result_is_terminal(rec["detail"]):
            plays.append(Play(game, play_start, rec["t_ms"]))
    return plays


def empty_summary() -> dict:
    return {g: {"count": 0, "total_ms": 0} for g in ("godai", "epta", "idio")}


def stats_for_player(logs: Iterable[tuple[dict, list[dict]]], player: str) -> dict:
    """Engagement summary for one nickname, folded purely from logs."""
    games = empty_summary()
    sessions = 0
    for header, records in logs:
        if player not in header["config"]["nicknames"]:
            continue
        sessions += 1
        for play in plays_in(header, records):
            games[play.game]["count"] += 1
            games[play.game]["total_ms"] += play.duration_ms
    return {"player": player, "sessions": sessions, "games": games}


class LogStore:
    """Directory of session logs, one JSONL file per session."""

    def __init__(self, root: Union[str, Path]) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def path_for(self, session_id: str) -> Path:
        return self.root / f"{session_id}.jsonl"

    def all_logs(self) -> list[tuple[dict, list[dict]]]:
        logs = []
        for path in sorted(self.root.glob("*.jsonl")):
            try:
                logs.append(read_log(path))
            except (ValueError, json.JSONDecodeError):
                continue  # foreign or torn file; stats must never crash
        return logs

    def stats(self, player: str) -> dict:
        return stats_for_player(self.all_logs(), player)
