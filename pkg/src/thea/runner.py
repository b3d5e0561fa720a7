"""Host runtime: wires the control loop, devices, transports and log into
one runnable session.

The runtime owns a discrete-event scheduler.  Everything that happens —
script events, armed timers, frame deliveries, actuation completions —
is an entry on that one heap, so a whole session is a single-threaded
fold and two runs of the same (config, seed, script) produce the same
log bytes.  Live play paces the identical machinery against the wall
clock; nothing else differs.
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

from thea.clock import Scheduler, VirtualClock
from thea.config import RigConfig
from thea.control import (
    ActuationAcked,
    AppendLog,
    ArmTimer,
    ControlState,
    DealtDraw,
    Effect,
    Event,
    GestureSource,
    HideResult,
    KillSwitch,
    NotifyUsageLimit,
    Phase,
    PlayCountdownSound,
    PlayFirstPitch,
    PlaySecondPitch,
    RandomDraw,
    RevealPressed,
    SendActuate,
    SendStopAll,
    ShowBreathing,
    ShowCountdown,
    ShowResult,
    SkipBreathing,
    StartPressed,
    TimerElapsed,
    UsageLimitReached,
    Voice,
    VoiceCommand,
    advance,
    game_summary,
)
from thea.device import DeviceSim
from thea.errors import InvalidConfig, InvalidEvent, ScriptDeadlock
from thea.gestures import Gesture, HandId, Side
from thea import logbook
from thea.protocol import (
    Actuate,
    ActuationDone,
    Completeness,
    EventKill,
    Frame,
    Pong,
    StatusResp,
    StopAll,
    decode_stream,
    encode,
)
from thea.rng import derive_stream
from thea.sessions import SessionConfig, derive_session_id
from thea.transport import SimLink

TERMINAL_PHASES = (Phase.COMPLETED, Phase.SAFE_OFF)
RESTING_PHASES = TERMINAL_PHASES + (Phase.PAUSED,)
_UNSET = object()


# -- scripts -----------------------------------------------------------------

@dataclass(frozen=True)
class InjectEvent:
    event: Event


@dataclass(frozen=True)
class ToggleKill:
    side: Side


@dataclass(frozen=True)
class SetIntensity:
    side: Side
    level: int


ScriptAction = Union[InjectEvent, ToggleKill, SetIntensity]


@dataclass(frozen=True)
class ScriptCommand:
    t_ms: int
    action: ScriptAction
    line: str


_SIDES = {"left": Side.LEFT, "right": Side.RIGHT}


def parse_script(text: str) -> list[ScriptCommand]:
    """Parse the `t_ms event [args]` script dialect.

    Grammar, one command per line (# comments, blank lines skipped)::

        <t_ms> start
        <t_ms> skip_breathing          (alias: skip)
        <t_ms> voice stop|pause|resume
        <t_ms> reveal
        <t_ms> kill left|right
        <t_ms> intensity left|right <1-10>
    """
    commands = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = shlex.split(line)
        try:
            t_ms = int(parts[0])
            if t_ms < 0:
                raise ValueError("negative time")
            word, args = parts[1], parts[2:]
            action: ScriptAction
            if word == "start" and not args:
                action = InjectEvent(StartPressed())
            elif word in ("skip_breathing", "skip") and not args:
                action = InjectEvent(SkipBreathing())
            elif word == "voice" and len(args) == 1:
                action = InjectEvent(VoiceCommand(Voice(args[0])))
            elif word == "reveal" and not args:
                action = InjectEvent(RevealPressed())
            elif word == "kill" and len(args) == 1:
                action = ToggleKill(_SIDES[args[0]])
            elif word == "intensity" and len(args) == 2:
                level = int(args[1])
                if not 1 <= level <= 10:
                    raise ValueError("intensity outside 1..10")
                action = SetIntensity(_SIDES[args[0]], level)
            else:
                raise ValueError(f"unknown command {word!r}")
        except (ValueError, KeyError, IndexError) as exc:
            raise InvalidConfig(f"script line {lineno}: {exc}") from exc
        commands.append(ScriptCommand(t_ms, action, line))
    return commands


def _event_label(event: Event) -> str:
    names = {StartPressed: "start_pressed", SkipBreathing: "skip_breathing",
             VoiceCommand: "voice", RevealPressed: "reveal_pressed",
             TimerElapsed: "timer_elapsed", ActuationAcked: "actuation_acked",
             KillSwitch: "kill_switch", }
    label = names.get(type(event), type(event).__name__.lower())
    if isinstance(event, VoiceCommand):
        label = f"voice_{event.command.value}"
    return label


# -- the runtime -------------------------------------------------------------

class SessionRuntime:
    """One session end to end: control state, two rigs, four links, a log."""

    def __init__(self, cfg: SessionConfig, rig: Optional[RigConfig] = None, *,
                 script_text: str = "",
                 out_path: Union[str, Path, None] = None,
                 clock_mode: str = "virtual",
                 session_id: Optional[str] = None,
                 max_ms: Optional[int] = None,
                 on_record: Optional[Callable[[dict], None]] = None) -> None:
        self.cfg = cfg
        self.rig = rig or RigConfig.default()
        if sorted(self.rig.devices) != ["left", "right"]:
            raise InvalidConfig("the rig must hold exactly two devices, ids 'left' and 'right'")
        self.session_id = session_id or derive_session_id(cfg, script_text)
        self.clock = VirtualClock()
        self.scheduler = Scheduler(self.clock)
        self.script = parse_script(script_text)
        self.ended = False

        left, right = cfg.hands
        self.hand_of_device = {"left": left, "right": right}
        self.device_of_hand = {left: "left", right: "right"}

        base: GestureSource = RandomDraw(derive_stream(cfg.seed, "draws"))
        self.draws: GestureSource = (DealtDraw(cfg.gesture_script, base)
                                     if cfg.gesture_script else base)

        self.max_ms = max_ms
        header_config = dict(cfg.to_dict())
        header_config["rig"] = self.rig.to_dict()
        self.log = logbook.LogWriter(
            self.session_id, clock_mode, header_config, script_text,
            path=out_path, on_record=on_record,
            extra_header={"max_ms": max_ms} if clock_mode == "virtual" else None)

        self.devices: dict[str, DeviceSim] = {}
        self.links_down: dict[str, SimLink] = {}
        self.links_up: dict[str, SimLink] = {}
        self._host_rx = {did: b"" for did in ("left", "right")}
        for did in ("left", "right"):
            dev_cfg = self.rig.devices[did]
            up = SimLink(f"{did}:up", dev_cfg.transport, self.scheduler,
                         derive_stream(cfg.seed, f"link:{did}:up"),
                         lambda data, d=did: self._on_device_bytes(d, data))
            device = DeviceSim(dev_cfg, self.scheduler,
                               derive_stream(cfg.seed, f"device:{did}"),
                               emit=lambda fr, link=up: link.send(encode(fr)),
                               on_usage_limit=self._on_usage_limit)
            down = SimLink(f"{did}:down", dev_cfg.transport, self.scheduler,
                           derive_stream(cfg.seed, f"link:{did}:down"),
                           device.on_wire_bytes)
            self.devices[did] = device
            self.links_up[did] = up
            self.links_down[did] = down

        self.state = ControlState.new(cfg.game, cfg.mode, cfg.rules,
                                      cfg.timing, cfg.sound, left, right)
        self._timer_handles: dict[int, object] = {}
        self.log.append(0, logbook.SESSION_STARTED, {
            "nicknames": list(cfg.nicknames),
            "game": cfg.game.value,
            "mode": cfg.mode.value,
            "assignment": cfg.assignment.value,
        })

    # -- event intake ---------------------------------------------------

    def schedule_script(self, auto_start: bool = False) -> None:
        """Queue every script command; optionally press start at t=0."""
        if auto_start and not any(isinstance(c.action, InjectEvent)
                                  and isinstance(c.action.event, StartPressed)
                                  for c in self.script):
            self.scheduler.call_at(0, lambda: self.inject(StartPressed()))
        for cmd in self.script:
            self.scheduler.call_at(cmd.t_ms, lambda c=cmd: self._run_command(c))

    def _run_command(self, cmd: ScriptCommand) -> None:
        if isinstance(cmd.action, InjectEvent):
            self.inject(cmd.action.event)
        elif isinstance(cmd.action, ToggleKill):
            self.toggle_kill(cmd.action.side)
        else:
            self.set_intensity(cmd.action.side, cmd.action.level)

    def inject(self, event: Event) -> bool:
        """Feed one event through the control loop; False if it was invalid."""
        now = self.clock.now_ms()
        before = self.state
        try:
            after, effects = advance(before, event, now, self.draws)
        except InvalidEvent:
            self.log.append(now, "invalid_event", {
                "phase": before.phase.label(), "event": _event_label(event)})
            return False
        self.state = after
        self._prune_timers()
        if after.phase.label() != before.phase.label():
            self.log.append(now, logbook.PHASE_CHANGED, {
                "from": before.phase.label(), "to": after.phase.label()})
        if isinstance(event, RevealPressed):
            self.log.append(now, logbook.REVEAL_USED,
                            {"round": after.last_result.number})
        self._note_open_palms(before, after, now)
        for effect in effects:
            self._execute(effect, now)
        if after.phase.kind in TERMINAL_PHASES and not self.ended:
            self._end_session("completed", now)
        return True

    def _note_open_palms(self, before: ControlState, after: ControlState,
                         now: int) -> None:
        # A relaxed hand has no wire traffic, so its "gesture shown" is
        # recorded the moment the actuation window closes.
        if (before.phase.kind is Phase.ACTUATING
                and after.phase.kind is Phase.INTERPRET_WINDOW
                and before.plan is not None):
            for entry in before.plan.entries:
                if entry.channel is None:
                    self._log_gesture_shown(entry.hand, entry.gesture,
                                            Completeness.COMPLETE, now)

    def _log_gesture_shown(self, hand: HandId, gesture: Gesture,
                           completeness: Completeness, now: int) -> None:
        self.log.append(now, logbook.GESTURE_SHOWN, {
            "side": hand.side.value, "wearer": hand.wearer,
            "gesture": gesture.value,
            "completeness": completeness.name.lower()})

    # -- device plumbing --------------------------------------------------

    def toggle_kill(self, side: Side) -> bool:
        return self.devices[side.value].toggle_kill_switch()

    def set_intensity(self, side: Side, level: int) -> None:
        self.devices[side.value].manual_intensity = level
        self.log.append(self.clock.now_ms(), logbook.INTENSITY_SET,
                        {"side": side.value, "level": level})

    def _on_deadline(self, deadline_id: int) -> None:
        self._timer_handles.pop(deadline_id, None)
        self.inject(TimerElapsed(deadline_id))

    def _on_usage_limit(self, device_id: str) -> None:
        self.inject(UsageLimitReached(device_id))

    def _on_device_bytes(self, device_id: str, data: bytes) -> None:
        frames, diags, self._host_rx[device_id] = decode_stream(
            self._host_rx[device_id] + data)
        now = self.clock.now_ms()
        for frame in frames:
            self._on_device_frame(device_id, frame, now)

    def _on_device_frame(self, device_id: str, frame: Frame, now: int) -> None:
        hand = self.hand_of_device[device_id]
        if isinstance(frame, ActuationDone):
            gesture = self.cfg.rules.gesture_for_channel(frame.channel)
            self._log_gesture_shown(hand, gesture, frame.completeness, now)
            self.inject(ActuationAcked(hand, frame.completeness is Completeness.COMPLETE))
        elif isinstance(frame, EventKill):
            self.inject(KillSwitch(hand))
        elif isinstance(frame, (StatusResp, Pong)):
            self.log.append(now, logbook.EFFECT, {
                "effect": "frame_received", "device": device_id,
                "kind": type(frame).__name__.lower()})

    # -- effect execution --------------------------------------------------

    def _prune_timers(self) -> None:
        # The loop keeps at most one deadline armed; anything else on the
        # heap is a superseded timer that would only fire as a no-op.
        for deadline_id in list(self._timer_handles):
            if deadline_id != self.state.armed_id:
                self._timer_handles.pop(deadline_id).cancel()

    def _execute(self, effect: Effect, now: int) -> None:
        if isinstance(effect, ArmTimer):
            handle = self.scheduler.call_after(
                effect.delay_ms,
                lambda e=effect: self._on_deadline(e.deadline_id))
            self._timer_handles[effect.deadline_id] = handle
            self.log.append(now, logbook.EFFECT, {
                "effect": "arm_timer", "deadline_id": effect.deadline_id,
                "delay_ms": effect.delay_ms})
        elif isinstance(effect, SendActuate):
            did = self.device_of_hand[effect.hand]
            self.links_down[did].send(encode(Actuate(effect.channel,
                                                     effect.duration_ms)))
            self.log.append(now, logbook.EFFECT, {
                "effect": "send_actuate", "side": effect.hand.side.value,
                "channel": effect.channel, "duration_ms": effect.duration_ms})
        elif isinstance(effect, SendStopAll):
            for did in ("left", "right"):
                self.links_down[did].send(encode(StopAll()))
            self.log.append(now, logbook.EFFECT, {"effect": "send_stop_all"})
        elif isinstance(effect, AppendLog):
            self._append_semantic(effect, now)
        elif isinstance(effect, NotifyUsageLimit):
            self.log.append(now, logbook.EFFECT, {
                "effect": "notify_usage_limit", "device": effect.device_id})
        elif isinstance(effect, ShowResult):
            self.log.append(now, logbook.EFFECT, {
                "effect": "show_result", "duration_ms": effect.duration_ms,
                "result": effect.result.to_dict()})
        elif isinstance(effect, PlaySecondPitch):
            self.log.append(now, logbook.EFFECT, {
                "effect": "play_second_pitch", "gesture": effect.gesture.value})
        elif isinstance(effect, (PlayCountdownSound, ShowCountdown)):
            name = ("play_countdown_sound"
                    if isinstance(effect, PlayCountdownSound) else "show_countdown")
            self.log.append(now, logbook.EFFECT,
                            {"effect": name, "tick": effect.tick})
        elif isinstance(effect, PlayFirstPitch):
            self.log.append(now, logbook.EFFECT, {"effect": "play_first_pitch"})
        elif isinstance(effect, ShowBreathing):
            self.log.append(now, logbook.EFFECT, {"effect": "show_breathing"})
        elif isinstance(effect, HideResult):
            self.log.append(now, logbook.EFFECT, {"effect": "hide_result"})
        else:
            raise AssertionError(f"unhandled effect {effect!r}")

    def _append_semantic(self, note: AppendLog, now: int) -> None:
        mapped = {
            "round_started": logbook.ROUND_STARTED,
            "round_result": logbook.ROUND_RESOLVED,
            "paused": logbook.PAUSED,
            "resumed": logbook.RESUMED,
            "kill_switch": logbook.KILL_SWITCH,
            "usage_limit": logbook.USAGE_LIMIT,
            "completed": logbook.GAME_COMPLETED,
            "stopped": "stopped",
        }[note.kind]
        self.log.append(now, mapped, note.data)
        if note.kind == "stopped":
            self._end_session("stopped", now)
        elif note.kind == "kill_switch":
            self._end_session("kill_switch", now)

    def _end_session(self, reason: str, now: int) -> None:
        if self.ended:
            return
        self.ended = True
        self.log.append(now, logbook.SESSION_ENDED,
                        {"duration_ms": now, "reason": reason})

    def snapshot(self) -> dict:
        """Point-in-time view of the whole session, for APIs and tooling."""
        return {
            "session_id": self.session_id,
            "phase": self.state.phase.label(),
            "t_ms": self.clock.now_ms(),
            "ended": self.ended,
            "rounds_planned": self.state.rounds_planned,
            "game": game_summary(self.state),
            "last_result": (self.state.last_result.to_dict()
                            if self.state.last_result else None),
            "records": len(self.log.records),
            "devices": {
                did: {
                    "kill_switch_on": dev.kill_switch_on,
                    "active_channel": dev.active_channel(),
                    "calibrated": list(dev.calibrated_channels()),
                    "cumulative_on_ms": dev.cumulative_on_ms,
                    "intensity": dev.manual_intensity,
                }
                for did, dev in sorted(self.devices.items())
            },
        }

    # -- headless driving --------------------------------------------------

    def run(self, max_ms: Union[int, None, object] = _UNSET,
            auto_start: bool = True) -> None:
        """Drain the scheduler; the usual entry point for scripted runs.

        Raises ScriptDeadlock when the queue dries up while the loop still
        expects something (no timer armed, nothing scripted, not ended).
        """
        if max_ms is _UNSET:
            max_ms = self.max_ms
        self.schedule_script(auto_start=auto_start)
        self.scheduler.run_all(limit_ms=max_ms)
        pending = self.scheduler.next_deadline() is not None
        phase = self.state.phase.kind
        if phase in TERMINAL_PHASES:
            pass  # inject() already closed the books at the terminal event
        elif phase is Phase.PAUSED:
            pass  # a paused transcript simply ends paused
        elif pending:
            # Cut off mid-flight by the cap; land exactly on it.
            self.scheduler.run_until(max_ms)
            self._end_session("time_limit", max_ms)
        else:
            raise ScriptDeadlock(
                f"script exhausted while the session sat in {self.state.phase.label()}")
        self.log.close()


def run_session(cfg: SessionConfig, rig: Optional[RigConfig] = None, *,
                script_text: str = "",
                out_path: Union[str, Path, None] = None,
                max_ms: Optional[int] = None,
                auto_start: bool = True) -> SessionRuntime:
    """Run one headless virtual-clock session to rest and return the runtime."""
    runtime = SessionRuntime(cfg, rig, script_text=script_text,
                             out_path=out_path, max_ms=max_ms)
    runtime.run(auto_start=auto_start)
    return runtime
