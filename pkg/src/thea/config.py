"""Machine-readable game and rig configuration.

One human-editable YAML file fixes everything the games leave open: the
gesture/element/number bijections, the gesture-to-channel map, the
dominance relation, and the strike threshold.  A second file describes the
rig (device ids, per-channel starting fidelity, transport behaviour).
Both are validated hard at load time; a session never starts on a config
that violates an invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from enum import Enum
from pathlib import Path
from typing import Optional, Union

import yaml

from thea.dominance import DominanceMatrix
from thea.errors import ConfigError
from thea.gestures import Element, Gesture

#: Default gesture assignments. OpenPalm=water/5/no-channel is fixed by the
#: hardware (nothing drives the relaxed hand); the rest is convention.
_DEFAULT_GESTURES: dict[Gesture, tuple[Element, int, Optional[int]]] = {
    Gesture.OPEN_PALM: (Element.WATER, 5, None),
    Gesture.THREE_FINGER: (Element.FIRE, 1, 1),
    Gesture.MIDDLE_FINGER: (Element.WOOD, 0, 2),
    Gesture.WRIST_INWARD: (Element.EARTH, 2, 3),
    Gesture.WRIST_OUTWARD: (Element.METAL, 3, 4),
}


@dataclass(frozen=True)
class GameRules:
    """Validated rule bundle consumed at session start."""

    element_of: dict[Gesture, Element]
    number_of: dict[Gesture, int]
    channel_of: dict[Gesture, Optional[int]]
    dominance: DominanceMatrix
    strike_threshold: int = 2

    def __post_init__(self):
        gestures = set(Gesture)
        if set(self.element_of) != gestures or set(self.number_of) != gestures \
                or set(self.channel_of) != gestures:
            raise ConfigError("every gesture needs an element, a number, and a channel entry")
        if len(set(self.element_of.values())) != 5:
            raise ConfigError("gesture->element map must be a bijection")
        numbers = list(self.number_of.values())
        if len(set(numbers)) != 5 or any(n < 0 for n in numbers):
            raise ConfigError("gesture->number map must be five distinct non-negative numbers")
        if self.element_of[Gesture.OPEN_PALM] is not Element.WATER:
            raise ConfigError("open palm must mean water")
        if self.number_of[Gesture.OPEN_PALM] != 5:
            raise ConfigError("open palm must mean 5")
        if self.channel_of[Gesture.OPEN_PALM] is not None:
            raise ConfigError("open palm is driven by no channel")
        driven = [ch for g, ch in self.channel_of.items() if g is not Gesture.OPEN_PALM]
        if sorted(driven) != [1, 2, 3, 4]:
            raise ConfigError("the four driven gestures must map onto channels 1..4")
        if self.strike_threshold < 2:
            raise ConfigError("strike threshold must be at least 2")
        self.dominance.validate()

    @property
    def epta_numbers(self) -> frozenset[int]:
        return frozenset(self.number_of.values())

    def gesture_for_element(self, element: Element) -> Gesture:
        for g, e in self.element_of.items():
            if e is element:
                return g
        raise KeyError(element)

    def gesture_for_number(self, number: int) -> Gesture:
        for g, n in self.number_of.items():
            if n == number:
                return g
        raise KeyError(number)

    def gesture_for_channel(self, channel: int) -> Gesture:
        for g, ch in self.channel_of.items():
            if ch == channel:
                return g
        raise KeyError(channel)

    @classmethod
    def default(cls) -> "GameRules":
        return cls(
            element_of={g: e for g, (e, _, _) in _DEFAULT_GESTURES.items()},
            number_of={g: n for g, (_, n, _) in _DEFAULT_GESTURES.items()},
            channel_of={g: c for g, (_, _, c) in _DEFAULT_GESTURES.items()},
            dominance=DominanceMatrix.default(),
            strike_threshold=2,
        )

    def to_dict(self) -> dict:
        """Stable, serializable form (log headers, config round-trips)."""
        return {
            "gestures": {
                g.value: {
                    "element": self.element_of[g].value,
                    "number": self.number_of[g],
                    "channel": self.channel_of[g],
                }
                for g in Gesture
            },
            "dominance": self.dominance.as_wins(),
            "strike_threshold": self.strike_threshold,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "GameRules":
        try:
            gestures = raw["gestures"]
            element_of, number_of, channel_of = {}, {}, {}
            for name, entry in gestures.items():
                g = Gesture(name)
                element_of[g] = Element(entry["element"])
                number_of[g] = int(entry["number"])
                ch = entry.get("channel")
                channel_of[g] = None if ch is None else int(ch)
            wins = {
                Element(w): [Element(l) for l in losers]
                for w, losers in raw["dominance"].items()
            }
            dominance = DominanceMatrix.from_wins(wins)
            threshold = int(raw.get("strike_threshold", 2))
        except ConfigError:
            raise
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"malformed game config: {exc}") from exc
        return cls(element_of, number_of, channel_of, dominance, threshold)


def load_game_rules(path: Union[str, Path, None] = None) -> GameRules:
    if path is None:
        return GameRules.default()
    raw = yaml.safe_load(Path(path).read_text())
    return GameRules.from_dict(raw)


# --- rig (device + transport) config -------------------------------------

@dataclass(frozen=True)
class TransportConfig:
    """Latency/fault model of one device's simulated link (both directions)."""

    latency_ms: tuple[int, int] = (5, 5)  # fixed = equal bounds
    drop_prob: float = 0.0
    duplicate_prob: float = 0.0

    def __post_init__(self):
        lo, hi = self.latency_ms
        if lo < 0 or hi < lo:
            raise ConfigError("latency bounds must satisfy 0 <= lo <= hi")
        for name, p in (("drop_prob", self.drop_prob), ("duplicate_prob", self.duplicate_prob)):
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must be within [0, 1]")

    def to_dict(self) -> dict:
        return {
            "latency_ms": list(self.latency_ms),
            "drop_prob": self.drop_prob,
            "duplicate_prob": self.duplicate_prob,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "TransportConfig":
        lat = raw.get("latency_ms", 5)
        if isinstance(lat, (int, float)):
            bounds = (int(lat), int(lat))
        else:
            bounds = (int(lat[0]), int(lat[1]))
        return cls(
            latency_ms=bounds,
            drop_prob=float(raw.get("drop_prob", 0.0)),
            duplicate_prob=float(raw.get("duplicate_prob", 0.0)),
        )


@dataclass(frozen=True)
class DeviceConfig:
    """Startup state of one wearable unit."""

    device_id: str
    fidelity: dict[int, float] = field(default_factory=dict)  # channel -> [0,1]
    transport: TransportConfig = TransportConfig()

    def __post_init__(self):
        for ch, f in self.fidelity.items():
            if ch not in (1, 2, 3, 4):
                raise ConfigError(f"device {self.device_id}: channel {ch} outside 1..4")
            if not 0.0 <= f <= 1.0:
                raise ConfigError(f"device {self.device_id}: fidelity {f} outside [0, 1]")
            if round(f * 1000) != f * 1000:
                raise ConfigError(
                    f"device {self.device_id}: fidelity {f} finer than the wire's 1/1000 step"
                )

    def to_dict(self) -> dict:
        return {
            "channels": {str(ch): self.fidelity[ch] for ch in sorted(self.fidelity)},
            "transport": self.transport.to_dict(),
        }


@dataclass(frozen=True)
class RigConfig:
    """The two-device rig a session runs against."""

    devices: dict[str, DeviceConfig]

    def to_dict(self) -> dict:
        return {"devices": {did: d.to_dict() for did, d in sorted(self.devices.items())}}

    @classmethod
    def from_dict(cls, raw: dict) -> "RigConfig":
        devices = {}
        for did, entry in raw.get("devices", {}).items():
            fid = {int(ch): float(f) for ch, f in (entry.get("channels") or {}).items()}
            transport = TransportConfig.from_dict(entry.get("transport") or {})
            devices[did] = DeviceConfig(did, fid, transport)
        return cls(devices)

    @classmethod
    def default(cls) -> "RigConfig":
        full = {1: 0.9, 2: 0.9, 3: 0.9, 4: 0.9}
        return cls({
            "left": DeviceConfig("left", dict(full)),
            "right": DeviceConfig("right", dict(full)),
        })


def load_rig(path: Union[str, Path, None] = None) -> RigConfig:
    if path is None:
        return RigConfig.default()
    raw = yaml.safe_load(Path(path).read_text())
    return RigConfig.from_dict(raw)


# --- pacing and sound -----------------------------------------------------

class SoundMode(Enum):
    """How much audio accompanies a round.

    The first pitch warns that actuation is imminent; the second plays a
    gesture-specific tone as the hand moves.  Countdown beeps are part of
    onboarding and play in every mode.
    """

    TWO_PITCH = "two_pitch"
    FIRST_PITCH_ONLY = "first_pitch_only"
    OFF = "off"


@dataclass(frozen=True)
class TimingConfig:
    """Every pacing knob of the session loop, in milliseconds."""

    countdown_tick_ms: int = 1000
    actuation_ms: int = 2000
    interpret_window_ms: int = 3000
    reveal_ms: int = 2000
    breathing_max_ms: int = 30000
    inter_round_gap_ms: int = 1000
    first_pitch_lead_ms: int = 500  # warning-tone head start before actuation

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if value <= 0:
                raise ConfigError(f"{name} must be strictly positive")
        if self.actuation_ms > 2000:
            raise ConfigError("actuation_ms above the 2000ms safety ceiling")

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, raw: dict) -> "TimingConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown timing fields: {sorted(unknown)}")
        return cls(**{k: int(v) for k, v in raw.items()})
