"""Command line front door.

    thea run     headless scripted session on the virtual clock
    thea replay  re-run a log's (config, seed, script) and verify bytes
    thea serve   live HTTP/WebSocket service on the wall clock
    thea stats   engagement summary for one player
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from thea.config import SoundMode, load_game_rules, load_rig
from thea.errors import TheaError
from thea.games import GodaiMode
from thea.gestures import GameKind
from thea.logbook import LogStore, read_log
from thea.runner import run_session
from thea.sessions import Assignment, SessionConfig


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thea",
                                     description="EMS hand-game engine")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scripted session headlessly")
    run.add_argument("--game", required=True, choices=[g.value for g in GameKind])
    run.add_argument("--mode", default="free", choices=[m.value for m in GodaiMode])
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--script", type=Path, default=None,
                     help="event script file (t_ms event [args] per line)")
    run.add_argument("--out", type=Path, default=None, help="write the JSONL log here")
    run.add_argument("--max-ms", type=int, default=600_000,
                     help="virtual-time cap (default 600000; free play needs one)")
    run.add_argument("--nicknames", default="player",
                     help="comma-separated, 1 (solo) or 2 (shared)")
    run.add_argument("--sound", default="two_pitch",
                     choices=[s.value for s in SoundMode])
    run.add_argument("--game-config", type=Path, default=None,
                     help="game rules YAML (meanings, dominance, threshold)")
    run.add_argument("--rig", type=Path, default=None, help="device rig YAML")

    replay = sub.add_parser("replay", help="verify a log replays byte-identically")
    replay.add_argument("--log", type=Path, required=True)

    serve = sub.add_parser("serve", help="run the live session service")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--config", type=Path, default=None,
                       help="service YAML: data_dir, devices")
    serve.add_argument("--data-dir", type=Path, default=Path("thea_data"))

    stats = sub.add_parser("stats", help="per-player engagement summary")
    stats.add_argument("--player", required=True)
    stats.add_argument("--data-dir", type=Path, default=Path("thea_data"))

    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    nicknames = tuple(n.strip() for n in args.nicknames.split(",") if n.strip())
    assignment = (Assignment.SOLO_TWO_HANDS if len(nicknames) == 1
                  else Assignment.SHARED_ONE_HAND_EACH)
    cfg = SessionConfig(
        nicknames=nicknames,
        game=GameKind(args.game),
        mode=GodaiMode(args.mode),
        sound=SoundMode(args.sound),
        seed=args.seed,
        assignment=assignment,
        rules=load_game_rules(args.game_config),
    )
    script_text = args.script.read_text() if args.script else ""
    rig = load_rig(args.rig)
    runtime = run_session(cfg, rig, script_text=script_text,
                          out_path=args.out, max_ms=args.max_ms)
    snap = runtime.snapshot()
    print(f"session {snap['session_id']}: {snap['phase']} "
          f"after {snap['t_ms']} virtual ms, {snap['records']} records")
    print(json.dumps(snap["game"], sort_keys=True))
    if args.out:
        print(f"log written to {args.out}")
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    original = args.log.read_text()
    header, _ = read_log(args.log)
    from thea.config import RigConfig

    raw_cfg = dict(header["config"])
    rig = RigConfig.from_dict(raw_cfg.pop("rig", {"devices": {}}))
    if not rig.devices:
        rig = None
    cfg = SessionConfig.from_dict(raw_cfg)
    runtime = run_session(cfg, rig, script_text=header["script"], max_ms=None
                          if header.get("max_ms") is None else header["max_ms"])
    fresh = runtime.log.text()
    if fresh == original:
        print(f"OK: {args.log} replays byte-identically "
              f"({len(original.splitlines())} lines)")
        return 0
    for lineno, (a, b) in enumerate(zip(original.splitlines(),
                                        fresh.splitlines()), start=1):
        if a != b:
            print(f"MISMATCH at line {lineno}:\n  logged:   {a}\n  replayed: {b}",
                  file=sys.stderr)
            return 1
    print(f"MISMATCH: line counts differ "
          f"({len(original.splitlines())} vs {len(fresh.splitlines())})",
          file=sys.stderr)
    return 1


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn
    import yaml

    from thea.config import RigConfig
    from thea.service import SessionService
    from thea.webapi import create_app

    data_dir = args.data_dir
    rig = None
    if args.config is not None:
        raw = yaml.safe_load(args.config.read_text()) or {}
        if "data_dir" in raw:
            data_dir = Path(raw["data_dir"])
        if "devices" in raw:
            rig = RigConfig.from_dict(raw)
    service = SessionService(data_dir, rig)
    app = create_app(service)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    finally:
        service.shutdown()
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    summary = LogStore(args.data_dir).stats(args.player)
    print(json.dumps(summary, sort_keys=True, indent=2))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "replay": _cmd_replay,
                "serve": _cmd_serve, "stats": _cmd_stats}
    try:
        return handlers[args.command](args)
    except TheaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
