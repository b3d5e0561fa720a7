"""Virtual EMS rig: one wearable unit per hand.

Each unit is an EMS source whose single stimulation channel is split four
ways by a microcontroller; software picks which split channel fires and
for how long, nothing else.  Intensity, pulse rate and width live on a
physical dial out of software reach, so they never appear on the wire.

The simulator is a timed actor: frames arrive from its transport,-
responses and completion notices flow back, and all delays go through the
injected scheduler.  A physical kill switch overrides everything.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

from thea.clock import Scheduler
from thea.config import DeviceConfig
from thea.errors import Busy, KillSwitchEngaged, UnknownChannel
from thea.gestures import Gesture, HandId
from thea.protocol import (
    Actuate,
    ActuationDone,
    CalibrateSet,
    Completeness,
    Diagnostics,
    EventKill,
    Frame,
    Ping,
    Pong,
    StatusReq,
    StatusResp,
    StopAll,
    decode_stream,
)
from thea.rng import SeededStream

MASS_G = 350  # per-unit mass, informational only
USAGE_LIMIT_MS = 1_800_000  # 30 minutes of stimulation triggers a notice
CHANNELS = (1, 2, 3, 4)


@dataclass(frozen=True)
class ActuationReport:
    """Session-level record of one hand's actuation outcome."""

    hand: HandId
    gesture: Gesture
    completeness: Completeness
    at_ms: int


@dataclass
class ChannelState:
    index: int
    calibrated: bool = False
    fidelity: float = 0.0  # always 0 while uncalibrated
    active_until: Optional[int] = None
    active_since: Optional[int] = None
    pending_completeness: Optional[Completeness] = None


class DeviceSim:
    """One wearable unit.

    `handle_frame` is the spec'd transition and raises on misuse;
    `on_wire_bytes` is the tolerant actor entry point that feeds decoded
    frames through it and swallows rejections, as real firmware would.
    """

    def __init__(self, config: DeviceConfig, scheduler: Scheduler,
                 rng: SeededStream,
                 emit: Callable[[Frame], None],
                 on_usage_limit: Optional[Callable[[str], None]] = None) -> None:
        self.device_id = config.device_id
        self.scheduler = scheduler
        self.rng = rng
        self.emit = emit
        self.on_usage_limit = on_usage_limit
        self.channels = {i: ChannelState(i) for i in CHANNELS}
        for index, fidelity in config.fidelity.items():
            self.channels[index].calibrated = True
            self.channels[index].fidelity = fidelity
        self.kill_switch_on = False
        self.manual_intensity = 5  # wearer-set dial, logged and nothing more
        self.cumulative_on_ms = 0
        self.mass_g = MASS_G
        self.rx_diags = Diagnostics()
        self._rx_buffer = b""
        self._token = itertools.count(1)
        self._live_token = 0
        self.dropped_frames = 0
        self.activation_starts: list[tuple[int, int]] = []  # (t_ms, channel)

    # -- wire side -------------------------------------------------------

    def on_wire_bytes(self, data: bytes) -> None:
        frames, diags, self._rx_buffer = decode_stream(self._rx_buffer + data)
        self.rx_diags.merge(diags)
        for frame in frames:
            try:
                for response in self.handle_frame(frame):
                    self.emit(response)
            except (UnknownChannel, Busy):
                self.dropped_frames += 1  # firmware ignores what it cannot do

    def handle_frame(self, frame: Frame) -> list[Frame]:
        """Apply one frame; returns immediate responses."""
        now = self.scheduler.clock.now_ms()
        if self.kill_switch_on:
            return [EventKill()]
        if isinstance(frame, Actuate):
            self._start_actuation(frame.channel, frame.duration_ms, now)
            return []
        if isinstance(frame, StopAll):
            self.stop_all(now)
            return []
        if isinstance(frame, StatusReq):
            return [self._status()]
        if isinstance(frame, Ping):
            return [Pong()]
        if isinstance(frame, CalibrateSet):
            self.calibrate(frame.channel, frame.fidelity_milli / 1000)
            return []
        return []  # controller-bound kinds are ignored on this side

    # -- operations ------------------------------------------------------

    def _start_actuation(self, channel: int, duration_ms: int, now: int) -> None:
        if channel not in self.channels:
            raise UnknownChannel(f"channel {channel} not in 1..4")
        if self.active_channel() is not None:
            raise Busy("the split source already drives a channel")
        ch = self.channels[channel]
        ch.active_since = now
        ch.active_until = now + duration_ms
        self.activation_starts.append((now, channel))
        # Completeness is drawn up front so the draw order never depends on
        # how the actuation ends.
        complete = self.rng.chance(ch.fidelity)
        if not ch.calibrated:
            ch.pending_completeness = Completeness.NONE
        else:
            ch.pending_completeness = (Completeness.COMPLETE if complete
                                       else Completeness.PARTIAL)
        token = next(self._token)
        self._live_token = token
        self.scheduler.call_at(ch.active_until,
                               lambda: self._finish(channel, token))

    def _finish(self, channel: int, token: int) -> None:
        if token != self._live_token:
            return  # stopped or killed in the meantime
        ch = self.channels[channel]
        if ch.active_until is None:
            return
        done = ActuationDone(channel, ch.pending_completeness)
        self._deactivate(ch, self.scheduler.clock.now_ms())
        self.emit(done)

    def stop_all(self, now: Optional[int] = None) -> None:
        """Deactivate every channel immediately; partial time still accrues."""
        now = self.scheduler.clock.now_ms() if now is None else now
        self._live_token = next(self._token)
        for ch in self.channels.values():
            if ch.active_until is not None:
                self._deactivate(ch, now)

    def _deactivate(self, ch: ChannelState, now: int) -> None:
        assert ch.active_since is not None
        on_ms = max(0, min(now, ch.active_until or now) - ch.active_since)
        ch.active_until = None
        ch.active_since = None
        ch.pending_completeness = None
        self.accrue_usage(on_ms)

    def calibrate(self, channel: int, fidelity: float) -> None:
        if self.kill_switch_on:
            raise KillSwitchEngaged("cannot calibrate while the switch is thrown")
        if channel not in self.channels:
            raise UnknownChannel(f"channel {channel} not in 1..4")
        if not 0.0 <= fidelity <= 1.0:
            raise ValueError("fidelity must lie in [0, 1]")
        self.channels[channel].calibrated = True
        self.channels[channel].fidelity = fidelity

    def accrue_usage(self, active_ms: int) -> bool:
        """Add stimulation time; True the single time the 30-min line is crossed."""
        if active_ms < 0:
            raise ValueError("active time cannot be negative")
        before = self.cumulative_on_ms
        self.cumulative_on_ms = before + active_ms
        crossed = before < USAGE_LIMIT_MS <= self.cumulative_on_ms
        if crossed and self.on_usage_limit is not None:
            self.on_usage_limit(self.device_id)
        return crossed

    def toggle_kill_switch(self) -> bool:
        """Flip the physical override. Returns the new position."""
        self.kill_switch_on = not self.kill_switch_on
        if self.kill_switch_on:
            self.stop_all()
            self.emit(EventKill())
        return self.kill_switch_on

    # -- introspection ---------------------------------------------------

    def active_channel(self) -> Optional[int]:
        for ch in self.channels.values():
            if ch.active_until is not None:
                return ch.index
        return None

    def calibrated_channels(self) -> tuple[int, ...]:
        return tuple(i for i in CHANNELS if self.channels[i].calibrated)

    def fully_calibrated(self) -> bool:
        return len(self.calibrated_channels()) == len(CHANNELS)

    def _status(self) -> StatusResp:
        mask = 0
        for i in CHANNELS:
            if self.channels[i].calibrated:
                mask |= 1 << (i - 1)
        return StatusResp(self.kill_switch_on, self.active_channel() or 0,
                          mask, self.cumulative_on_ms)
