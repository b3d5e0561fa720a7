"""Session configuration and identity.

A session is fully described by (config, seed, script): the config decides
who plays what and how it sounds, the seed fixes every draw, and the
script supplies externally timed events.  Virtual-clock session ids are
derived from that triple, so the same run always gets the same id.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from thea.config import GameRules, SoundMode, TimingConfig
from thea.errors import InvalidConfig
from thea.games import GodaiMode
from thea.gestures import GameKind, Gesture, HandId, hands_for

MAX_SEED = 2 ** 64 - 1


class Assignment(Enum):
    """Who wears the two units."""

    SOLO_TWO_HANDS = "solo_two_hands"
    SHARED_ONE_HAND_EACH = "shared_one_hand_each"


@dataclass(frozen=True)
class SessionConfig:
    nicknames: tuple[str, ...]
    game: GameKind
    mode: GodaiMode
    sound: SoundMode
    seed: int
    assignment: Assignment
    timing: TimingConfig = field(default_factory=TimingConfig)
    rules: GameRules = field(default_factory=GameRules.default)
    #: Gestures dealt before the seeded stream takes over, in draw order
    #: (left hand first).  Lets a known sequence run through the whole
    #: engine while staying replayable from the log header.
    gesture_script: tuple[Gesture, ...] = ()

    def __post_init__(self):
        if not 1 <= len(self.nicknames) <= 2:
            raise InvalidConfig("a session takes one or two nicknames")
        if any(not n.strip() for n in self.nicknames):
            raise InvalidConfig("nicknames cannot be blank")
        if len(set(self.nicknames)) != len(self.nicknames):
            raise InvalidConfig("nicknames must differ")
        if self.assignment is Assignment.SHARED_ONE_HAND_EACH and len(self.nicknames) != 2:
            raise InvalidConfig("shared sessions need two nicknames")
        if self.assignment is Assignment.SOLO_TWO_HANDS and len(self.nicknames) != 1:
            raise InvalidConfig("solo sessions take exactly one nickname")
        if self.game in (GameKind.EPTA, GameKind.IDIO) and self.mode is not GodaiMode.FREE_PLAY:
            raise InvalidConfig(f"{self.game.value} offers free play only")
        if not 0 <= self.seed <= MAX_SEED:
            raise InvalidConfig("seed must fit in 64 bits")

    @property
    def hands(self) -> tuple[HandId, HandId]:
        return hands_for(self.nicknames)

    def to_dict(self) -> dict:
        return {
            "nicknames": list(self.nicknames),
            "game": self.game.value,
            "mode": self.mode.value,
            "sound": self.sound.value,
            "seed": self.seed,
            "assignment": self.assignment.value,
            "timing": self.timing.to_dict(),
            "rules": self.rules.to_dict(),
            "gesture_script": [g.value for g in self.gesture_script],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "SessionConfig":
        try:
            timing = TimingConfig.from_dict(raw.get("timing") or {})
            rules = (GameRules.from_dict(raw["rules"]) if raw.get("rules")
                     else GameRules.default())
            return cls(
                nicknames=tuple(raw["nicknames"]),
                game=GameKind(raw["game"]),
                mode=GodaiMode(raw.get("mode", "free")),
                sound=SoundMode(raw.get("sound", "two_pitch")),
                seed=int(raw.get("seed", 0)),
                assignment=Assignment(raw.get("assignment", "solo_two_hands")),
                timing=timing,
                rules=rules,
                gesture_script=tuple(Gesture(g) for g in raw.get("gesture_script", [])),
            )
        except InvalidConfig:
            raise
        except (KeyError, ValueError, TypeError) as exc:
            raise InvalidConfig(f"malformed session config: {exc}") from exc


def derive_session_id(cfg: SessionConfig, script_text: str) -> str:
    """Content-derived id: same (config, script) always names the same run."""
    blob = json.dumps({"config": cfg.to_dict(), "script": script_text},
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]
