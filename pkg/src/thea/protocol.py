"""Framed binary protocol between the session controller and the rigs.

Layout of every frame on the wire::

    SOF 0xA5 | version 0x01 | kind 1B | payload-len 1B | payload | CRC 2B

The CRC is CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, no reflection),
computed over version..payload and appended little-endian.  Multi-byte
payload fields are little-endian throughout.

Kinds and payloads:

====================  ====  =======================================
ACTUATE               0x01  channel u8, duration_ms u16
STOP_ALL              0x02  (empty)
STATUS_REQ            0x03  (empty)
STATUS_RESP           0x04  flags u8 (bit0 kill), active_channel u8
                            (0 = none), calibrated_mask u8,
                            cumulative_on_ms u32
EVENT_KILL            0x05  (empty)
PING                  0x06  (empty)
PONG                  0x07  (empty)
CALIBRATE_SET         0x08  channel u8, fidelity_milli u16 (0..1000)
ACTUATION_DONE        0x09  channel u8, completeness u8
====================  ====  =======================================

`decode_stream` never raises on hostile input: it resynchronizes on the
next SOF byte and reports what it skipped as diagnostics.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Optional, Union

from thea.errors import DurationTooLong, PayloadTooLarge, ProtocolError

SOF = 0xA5
VERSION = 0x01
MAX_DURATION_MS = 2000  # safety ceiling, enforced at encode time
_HEADER_LEN = 4  # SOF + version + kind + payload-len
_CRC_LEN = 2


class FrameKind(IntEnum):
    ACTUATE = 0x01
    STOP_ALL = 0x02
    STATUS_REQ = 0x03
    STATUS_RESP = 0x04
    EVENT_KILL = 0x05
    PING = 0x06
    PONG = 0x07
    CALIBRATE_SET = 0x08
    ACTUATION_DONE = 0x09


class Completeness(Enum):
    """How faithfully an actuation rendered its gesture."""

    NONE = 0
    PARTIAL = 1
    COMPLETE = 2


def _crc_table() -> tuple[int, ...]:
    table = []
    for byte in range(256):
        crc = byte << 8
        for _ in range(8):
            crc = ((crc << 1) ^ 0x1021 if crc & 0x8000 else crc << 1) & 0xFFFF
        table.append(crc)
    return tuple(table)


_TABLE = _crc_table()


def crc16(data: bytes) -> int:
    """CRC-16/CCITT-FALSE. Check vector: b"123456789" -> 0x29B1."""
    crc = 0xFFFF
    for byte in data:
        crc = ((crc << 8) & 0xFFFF) ^ _TABLE[(crc >> 8) ^ byte]
    return crc


@dataclass(frozen=True)
class Actuate:
    channel: int
    duration_ms: int
    kind = FrameKind.ACTUATE


@dataclass(frozen=True)
class StopAll:
    kind = FrameKind.STOP_ALL


@dataclass(frozen=True)
class StatusReq:
    kind = FrameKind.STATUS_REQ


@dataclass(frozen=True)
class StatusResp:
    kill_switch_on: bool
    active_channel: int  # 0 when no channel is active
    calibrated_mask: int  # bit i-1 set iff channel i calibrated
    cumulative_on_ms: int
    kind = FrameKind.STATUS_RESP


@dataclass(frozen=True)
class EventKill:
    kind = FrameKind.EVENT_KILL


@dataclass(frozen=True)
class Ping:
    kind = FrameKind.PING


@dataclass(frozen=True)
class Pong:
    kind = FrameKind.PONG


@dataclass(frozen=True)
class CalibrateSet:
    channel: int
    fidelity_milli: int  # fidelity in 1/1000 steps
    kind = FrameKind.CALIBRATE_SET


@dataclass(frozen=True)
class ActuationDone:
    channel: int
    completeness: Completeness
    kind = FrameKind.ACTUATION_DONE


Frame = Union[Actuate, StopAll, StatusReq, StatusResp, EventKill, Ping,
              Pong, CalibrateSet, ActuationDone]


def _payload_of(frame: Frame) -> bytes:
    if isinstance(frame, Actuate):
        if not 1 <= frame.channel <= 4:
            raise ProtocolError(f"channel {frame.channel} out of range 1..4")
        if not 0 <= frame.duration_ms <= MAX_DURATION_MS:
            raise DurationTooLong(
                f"duration {frame.duration_ms}ms exceeds the {MAX_DURATION_MS}ms ceiling")
        return struct.pack("<BH", frame.channel, frame.duration_ms)
    if isinstance(frame, StatusResp):
        if not 0 <= frame.active_channel <= 4:
            raise ProtocolError("active_channel out of range 0..4")
        flags = 0x01 if frame.kill_switch_on else 0x00
        return struct.pack("<BBBI", flags, frame.active_channel,
                           frame.calibrated_mask & 0x0F, frame.cumulative_on_ms)
    if isinstance(frame, CalibrateSet):
        if not 1 <= frame.channel <= 4:
            raise ProtocolError(f"channel {frame.channel} out of range 1..4")
        if not 0 <= frame.fidelity_milli <= 1000:
            raise ProtocolError("fidelity_milli out of range 0..1000")
        return struct.pack("<BH", frame.channel, frame.fidelity_milli)
    if isinstance(frame, ActuationDone):
        if not 1 <= frame.channel <= 4:
            raise ProtocolError(f"channel {frame.channel} out of range 1..4")
        return struct.pack("<BB", frame.channel, frame.completeness.value)
    return b""


def encode(frame: Frame) -> bytes:
    """Serialize one frame, enforcing the safety invariants."""
    payload = _payload_of(frame)
    if len(payload) > 255:
        raise PayloadTooLarge(f"payload of {len(payload)} bytes exceeds 255")
    body = bytes([VERSION, frame.kind.value, len(payload)]) + payload
    return bytes([SOF]) + body + struct.pack("<H", crc16(body))


def _parse_payload(kind: int, payload: bytes) -> Optional[Frame]:
    """Payload bytes -> frame, or None when the shape does not match the kind."""
    try:
        k = FrameKind(kind)
    except ValueError:
        return None
    try:
        if k is FrameKind.ACTUATE:
            channel, duration = struct.unpack("<BH", payload)
            return Actuate(channel, duration)
        if k is FrameKind.STOP_ALL:
            return StopAll() if payload == b"" else None
        if k is FrameKind.STATUS_REQ:
            return StatusReq() if payload == b"" else None
        if k is FrameKind.STATUS_RESP:
            flags, active, mask, on_ms = struct.unpack("<BBBI", payload)
            return StatusResp(bool(flags & 0x01), active, mask, on_ms)
        if k is FrameKind.EVENT_KILL:
            return EventKill() if payload == b"" else None
        if k is FrameKind.PING:
            return Ping() if payload == b"" else None
        if k is FrameKind.PONG:
            return Pong() if payload == b"" else None
        if k is FrameKind.CALIBRATE_SET:
            channel, milli = struct.unpack("<BH", payload)
            return CalibrateSet(channel, milli)
        if k is FrameKind.ACTUATION_DONE:
            channel, completeness = struct.unpack("<BB", payload)
            return ActuationDone(channel, Completeness(completeness))
    except (struct.error, ValueError):
        return None
    return None


@dataclass
class Diagnostics:
    """Counts of everything decode_stream had to skip over."""

    bad_crc: int = 0
    unknown_kind: int = 0
    truncated: int = 0

    @property
    def total(self) -> int:
        return self.bad_crc + self.unknown_kind + self.truncated

    def merge(self, other: "Diagnostics") -> None:
        self.bad_crc += other.bad_crc
        self.unknown_kind += other.unknown_kind
        self.truncated += other.truncated


def decode_stream(buffer: bytes) -> tuple[list[Frame], Diagnostics, bytes]:
    """Pull every complete frame out of a byte buffer.

    Returns (frames, diagnostics, remainder).  The remainder is a trailing
    partial frame, if any; feed it back in front of the next chunk.  Bad
    CRCs cause a one-byte resync so that frames hiding behind corruption
    are still found; an incomplete candidate never blocks the scan either,
    since garbage can impersonate a header whose claimed length swallows a
    genuine frame behind it.  Never raises, whatever the input.
    """
    frames: list[Frame] = []
    diags = Diagnostics()
    pos = 0
    pending = -1  # earliest candidate that is still awaiting bytes
    n = len(buffer)
    while True:
        sof = buffer.find(SOF, pos)
        if sof < 0:
            break
        plen = buffer[sof + 3] if n - sof >= _HEADER_LEN else 0
        total = _HEADER_LEN + plen + _CRC_LEN
        if n - sof < total:
            if pending < 0:
                pending = sof
            pos = sof + 1
            continue
        body = buffer[sof + 1:sof + _HEADER_LEN + plen]
        (crc,) = struct.unpack_from("<H", buffer, sof + _HEADER_LEN + plen)
        if crc16(body) != crc:
            diags.bad_crc += 1
            pos = sof + 1  # resync: the real frame may start inside this junk
            continue
        version, kind = body[0], body[1]
        frame = _parse_payload(kind, body[3:]) if version == VERSION else None
        if frame is None:
            diags.unknown_kind += 1
        else:
            frames.append(frame)
        if 0 <= pending < sof:
            pending = -1  # that candidate was junk inside a decoded span
        pos = sof + total
    if pending >= 0:
        # Nothing complete decoded at or past it: a genuine trailing partial.
        diags.truncated += 1
        return frames, diags, buffer[pending:]
    return frames, diags, b""


def decode(buffer: bytes) -> Frame:
    """Decode exactly one well-formed frame; for tests and tooling."""
    frames, diags, remainder = decode_stream(buffer)
    if len(frames) != 1 or diags.total or remainder:
        raise ProtocolError("buffer does not hold exactly one valid frame")
    return frames[0]
