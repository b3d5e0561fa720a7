"""Long-running session service: device registry, live sessions, stats.

The service owns the pair of virtual devices and at most one live session
at a time (both wearables belong to whoever is playing).  Each live
session runs the ordinary deterministic runtime, paced against the wall
clock by a pump thread; every mutation of a session happens on its pump
thread, so the single-logical-writer rule survives concurrent API calls.
"""

from __future__ import annotations

import itertools
import threading
import time
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional, Union

from thea.clock import WallClock
from thea.config import DeviceConfig, RigConfig, TransportConfig
from thea.control import (
    RevealPressed,
    SkipBreathing,
    StartPressed,
    Voice,
    VoiceCommand,
)
from thea.errors import (
    DeviceInUse,
    DevicesNotCalibrated,
    InvalidConfig,
    KillSwitchEngaged,
    UnknownDevice,
    UnknownSession,
)
from thea.gestures import Side
from thea.logbook import LogStore, SESSION_ENDED
from thea.runner import SessionRuntime
from thea.sessions import SessionConfig

DEVICE_IDS = ("left", "right")

#: External event vocabulary accepted by dispatch. Timer, ack, kill and
#: usage events are internal wiring and deliberately unreachable from the
#: API: the loop's pacing cannot be forged from outside.
_EVENT_BUILDERS: dict[str, Callable[[dict], Any]] = {
    "start": lambda body: StartPressed(),
    "start_pressed": lambda body: StartPressed(),
    "skip_breathing": lambda body: SkipBreathing(),
    "skip": lambda body: SkipBreathing(),
    "reveal": lambda body: RevealPressed(),
    "reveal_pressed": lambda body: RevealPressed(),
    "voice": lambda body: VoiceCommand(Voice(body["command"])),
}


def parse_api_event(body: dict):
    try:
        name = body["event"]
        return _EVENT_BUILDERS[name](body)
    except (KeyError, ValueError, TypeError) as exc:
        raise InvalidConfig(f"unrecognized event payload: {exc}") from exc


class SessionPump(threading.Thread):
    """Paces one runtime against the wall clock and serializes mutations."""

    POLL_S = 0.05

    def __init__(self, runtime: SessionRuntime) -> None:
        super().__init__(daemon=True, name=f"pump-{runtime.session_id}")
        self.runtime = runtime
        self.wall = WallClock()
        self.cond = threading.Condition()
        self.actions: deque[tuple[Callable[[], Any], dict]] = deque()
        self.alive = True

    def run(self) -> None:
        while self.alive:
            action = None
            with self.cond:
                if self.actions:
                    action = self.actions.popleft()
                else:
                    deadline = self.runtime.scheduler.next_deadline()
                    now = self.wall.now_ms()
                    if deadline is not None and deadline <= now:
                        pass  # work is due, fall through
                    else:
                        wait = (self.POLL_S if deadline is None
                                else min(self.POLL_S, (deadline - now) / 1000))
                        self.cond.wait(wait)
                        continue
            self.runtime.scheduler.run_all(limit_ms=self.wall.now_ms())
            if action is not None:
                fn, box = action
                # Land the clock on "now" so the event is stamped honestly.
                self.runtime.scheduler.run_until(self.wall.now_ms())
                try:
                    box["result"] = fn()
                except Exception as exc:  # surfaced to the calling thread
                    box["error"] = exc
                box["done"].set()

    def call(self, fn: Callable[[], Any], timeout_s: float = 5.0) -> Any:
        """Run fn on the pump thread and return its result."""
        box: dict = {"done": threading.Event()}
        with self.cond:
            self.actions.append((fn, box))
            self.cond.notify()
        if not box["done"].wait(timeout_s):
            raise TimeoutError("session pump did not respond")
        if "error" in box:
            raise box["error"]
        return box["result"]

    def stop(self) -> None:
        self.alive = False
        with self.cond:
            self.cond.notify()


class LiveSession:
    """A runtime, its pump, and its stream subscribers."""

    def __init__(self, runtime: SessionRuntime) -> None:
        self.runtime = runtime
        self.subscribers: list[Callable[[dict], None]] = []
        self._sub_lock = threading.Lock()
        runtime.log.on_record = self._fanout
        self.pump = SessionPump(runtime)
        self.pump.start()

    def _fanout(self, record: dict) -> None:
        with self._sub_lock:
            listeners = list(self.subscribers)
        for listener in listeners:
            listener(record)

    def subscribe(self, listener: Callable[[dict], None]) -> None:
        with self._sub_lock:
            self.subscribers.append(listener)

    def unsubscribe(self, listener: Callable[[dict], None]) -> None:
        with self._sub_lock:
            if listener in self.subscribers:
                self.subscribers.remove(listener)

    @property
    def ended(self) -> bool:
        return self.runtime.ended

    def close(self, reason: str = "closed") -> None:
        def _close():
            if not self.runtime.ended:
                self.runtime._end_session(reason, self.runtime.clock.now_ms())
            self.runtime.log.close()
        try:
            self.pump.call(_close)
        finally:
            self.pump.stop()


@dataclass
class DeviceEntry:
    """Registry state of one wearable between sessions."""

    device_id: str
    fidelity: dict[int, float]
    kill_switch_on: bool = False
    intensity: int = 5
    transport: TransportConfig = TransportConfig()

    def calibrated(self) -> bool:
        return sorted(self.fidelity) == [1, 2, 3, 4]


class SessionService:
    """create/dispatch/stats facade over sessions, devices, and logs."""

    def __init__(self, data_dir: Union[str, Path], rig: Optional[RigConfig] = None) -> None:
        self.store = LogStore(data_dir)
        self.devices: dict[str, DeviceEntry] = {}
        rig = rig or RigConfig(devices={})
        for did in DEVICE_IDS:
            cfg = rig.devices.get(did)
            self.devices[did] = DeviceEntry(
                did,
                dict(cfg.fidelity) if cfg else {},
                transport=cfg.transport if cfg else TransportConfig(),
            )
        self.sessions: dict[str, LiveSession] = {}
        self._lock = threading.Lock()
        self._counter = itertools.count(1)

    # -- devices -----------------------------------------------------------

    def calibrate(self, device_id: str, channel: int, fidelity: float) -> dict:
        entry = self._device(device_id)
        live = self._active_session()
        if live is not None:
            live.pump.call(
                lambda: live.runtime.devices[device_id].calibrate(channel, fidelity))
        else:
            if entry.kill_switch_on:
                raise KillSwitchEngaged("cannot calibrate while the switch is thrown")
            if not (isinstance(channel, int) and 1 <= channel <= 4):
                raise InvalidConfig(f"channel {channel} outside 1..4")
            if not 0.0 <= fidelity <= 1.0:
                raise InvalidConfig("fidelity must lie in [0, 1]")
        entry.fidelity[channel] = fidelity
        return self.device_status(device_id)

    def kill(self, device_id: str) -> dict:
        entry = self._device(device_id)
        live = self._active_session()
        if live is not None:
            engaged = live.pump.call(
                lambda: live.runtime.toggle_kill(Side(device_id)))
            entry.kill_switch_on = engaged
        else:
            entry.kill_switch_on = not entry.kill_switch_on
        return self.device_status(device_id)

    def device_status(self, device_id: str) -> dict:
        entry = self._device(device_id)
        live = self._active_session()
        status = {
            "device_id": device_id,
            "calibrated_channels": sorted(entry.fidelity),
            "fidelity": {str(ch): entry.fidelity[ch] for ch in sorted(entry.fidelity)},
            "kill_switch_on": entry.kill_switch_on,
            "intensity": entry.intensity,
            "in_session": None,
        }
        if live is not None:
            dev = live.runtime.devices[device_id]
            status["kill_switch_on"] = dev.kill_switch_on
            status["in_session"] = live.runtime.session_id
            status["cumulative_on_ms"] = dev.cumulative_on_ms
        return status

    def _device(self, device_id: str) -> DeviceEntry:
        if device_id not in self.devices:
            raise UnknownDevice(f"no such device {device_id!r}")
        return self.devices[device_id]

    def _active_session(self) -> Optional[LiveSession]:
        for live in self.sessions.values():
            if not live.ended:
                return live
        return None

    # -- sessions ----------------------------------------------------------

    def create_session(self, cfg: SessionConfig) -> dict:
        with self._lock:
            for entry in self.devices.values():
                if not entry.calibrated():
                    raise DevicesNotCalibrated(
                        f"device {entry.device_id!r} is missing calibration")
            active = self._active_session()
            if active is not None:
                raise DeviceInUse(
                    f"devices are held by session {active.runtime.session_id}")
            rig = RigConfig(devices={
                did: DeviceConfig(did, dict(entry.fidelity), entry.transport)
                for did, entry in self.devices.items()
            })
            session_id = f"live-{next(self._counter):04d}-{cfg.seed:x}"
            runtime = SessionRuntime(
                cfg, rig, clock_mode="wall", session_id=session_id,
                out_path=self.store.path_for(session_id))
            for did, entry in self.devices.items():
                if entry.kill_switch_on:
                    runtime.devices[did].kill_switch_on = True
                runtime.devices[did].manual_intensity = entry.intensity
            live = LiveSession(runtime)
            self.sessions[session_id] = live
            return runtime.snapshot()

    def _session(self, session_id: str) -> LiveSession:
        if session_id not in self.sessions:
            raise UnknownSession(f"no session {session_id!r}")
        return self.sessions[session_id]

    def dispatch(self, session_id: str, body: dict) -> dict:
        live = self._session(session_id)
        event = parse_api_event(body)
        accepted = live.pump.call(lambda: live.runtime.inject(event))
        snap = live.runtime.snapshot()
        return {"accepted": accepted, "phase": snap["phase"], "session": snap}

    def snapshot(self, session_id: str) -> dict:
        return self._session(session_id).runtime.snapshot()

    def records_since(self, session_id: str, since_seq: int) -> list[dict]:
        live = self._session(session_id)
        return [r for r in list(live.runtime.log.records) if r["seq"] > since_seq]

    def close_session(self, session_id: str) -> dict:
        live = self._session(session_id)
        live.close()
        snap = live.runtime.snapshot()
        del self.sessions[session_id]
        return snap

    # -- statistics ----------------------------------------------------------

    def stats(self, player: str) -> dict:
        return self.store.stats(player)

    def shutdown(self) -> None:
        for session_id in list(self.sessions):
            try:
                self.close_session(session_id)
            except Exception:
                pass
