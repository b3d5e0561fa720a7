"""Hand gestures, their per-game meanings, and hand identity.

The five EMS-actuated gestures are the single currency of the system: each
game reads them differently (element, number, or the gesture itself), the
device maps four of them to stimulation channels, and the open palm is the
one gesture driven by no channel at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Union

if TYPE_CHECKING:
    from thea.config import GameRules


class Gesture(Enum):
    OPEN_PALM = "open_palm"
    THREE_FINGER = "three_finger"
    MIDDLE_FINGER = "middle_finger"
    WRIST_INWARD = "wrist_inward"
    WRIST_OUTWARD = "wrist_outward"


#: Canonical draw order. Seeded draws index into this tuple, so it is part
#: of the determinism contract and must never be reordered.
GESTURE_ORDER: tuple[Gesture, ...] = (
    Gesture.OPEN_PALM,
    Gesture.THREE_FINGER,
    Gesture.MIDDLE_FINGER,
    Gesture.WRIST_INWARD,
    Gesture.WRIST_OUTWARD,
)


class Element(Enum):
    WOOD = "wood"
    FIRE = "fire"
    EARTH = "earth"
    METAL = "metal"
    WATER = "water"


class GameKind(Enum):
    GODAI = "godai"
    EPTA = "epta"
    IDIO = "idio"


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class HandId:
    """One wearable unit: a body side plus the nickname wearing it.

    Solo play puts the same wearer on both sides; shared play puts a
    different wearer on each.
    """

    side: Side
    wearer: str

    def __str__(self) -> str:
        return f"{self.side.value}:{self.wearer}"


def hands_for(assignment_nicknames: list[str]) -> tuple[HandId, HandId]:
    """Build the (left, right) hand pair for 1 (solo) or 2 (shared) nicknames."""
    if len(assignment_nicknames) == 1:
        solo = assignment_nicknames[0]
        return HandId(Side.LEFT, solo), HandId(Side.RIGHT, solo)
    if len(assignment_nicknames) == 2:
        a, b = assignment_nicknames
        return HandId(Side.LEFT, a), HandId(Side.RIGHT, b)
    raise ValueError("a session has exactly one or two wearers")


Meaning = Union[Element, int, Gesture]


def meaning_of(gesture: Gesture, game: GameKind, rules: "GameRules") -> Meaning:
    """What this gesture means in the given game.

    Total on all five gestures: an element in the five-element duel, a
    number in the sum-to-seven game, and the gesture itself in the
    matching game.
    """
    if game is GameKind.GODAI:
        return rules.element_of[gesture]
    if game is GameKind.EPTA:
        return rules.number_of[gesture]
    return gesture


def meaning_label(gesture: Gesture, game: GameKind, rules: "GameRules") -> Union[str, int]:
    """JSON-safe form of meaning_of: enum meanings collapse to their names."""
    meaning = meaning_of(gesture, game, rules)
    return meaning.value if isinstance(meaning, (Element, Gesture)) else meaning
