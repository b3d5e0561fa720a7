"""Rule engines for the three hand games.

Three pure, chance-driven state machines:

* **Godai** — both hands show an element; the dominance relation decides
  the round; best-of-N or free play.
* **Eptá** — hands alternate revealing numbers; a hand whose running sum
  hits exactly seven wins, a hand that overshoots loses.
* **Ídio** — both hands show gestures; a gesture shown by enough hands at
  once is struck off; the game ends when all five are struck.

Every transition is a pure function (state, input) -> state; drawing is
the only random step and goes through an injected seeded stream.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence, Union

from thea.config import GameRules
from thea.errors import (
    AlreadyFinished,
    GameOver,
    NoGesturesRemaining,
    StruckGestureShown,
)
from thea.gestures import GESTURE_ORDER, Element, GameKind, Gesture, HandId
from thea.rng import SeededStream


class GodaiMode(Enum):
    BEST_OF_3 = "bo3"
    BEST_OF_5 = "bo5"
    FREE_PLAY = "free"

    @property
    def target(self) -> Optional[int]:
        """Points needed to take the match; None in free play."""
        return {"bo3": 2, "bo5": 3, "free": None}[self.value]


class RoundOutcome(Enum):
    LEFT_WINS = "left_wins"
    RIGHT_WINS = "right_wins"
    TIE = "tie"


def godai_resolve(left: Element, right: Element, matrix) -> RoundOutcome:
    """Decide one element duel round. Tie iff both hands show the same element."""
    if left is right:
        return RoundOutcome.TIE
    return RoundOutcome.LEFT_WINS if matrix.beats(left, right) else RoundOutcome.RIGHT_WINS


@dataclass(frozen=True)
class GodaiRound:
    number: int
    left: Gesture
    right: Gesture
    outcome: RoundOutcome


@dataclass(frozen=True)
class GodaiState:
    mode: GodaiMode
    left: HandId
    right: HandId
    scores: dict[HandId, int]
    history: tuple[GodaiRound, ...] = ()

    @classmethod
    def new(cls, mode: GodaiMode, left: HandId, right: HandId) -> "GodaiState":
        return cls(mode=mode, left=left, right=right, scores={left: 0, right: 0})

    @property
    def finished(self) -> bool:
        target = self.mode.target
        return target is not None and any(s >= target for s in self.scores.values())

    @property
    def winner(self) -> Optional[HandId]:
        target = self.mode.target
        if target is None:
            return None
        for hand, score in self.scores.items():
            if score >= target:
                return hand
        return None


def godai_apply(state: GodaiState, left: Gesture, right: Gesture,
                rules: GameRules) -> GodaiState:
    """Score one round. Ties award no point and the round is simply replayed."""
    if state.finished:
        raise AlreadyFinished("the match already has a winner")
    outcome = godai_resolve(rules.element_of[left], rules.element_of[right],
                            rules.dominance)
    scores = dict(state.scores)
    if outcome is RoundOutcome.LEFT_WINS:
        scores[state.left] += 1
    elif outcome is RoundOutcome.RIGHT_WINS:
        scores[state.right] += 1
    record = GodaiRound(len(state.history) + 1, left, right, outcome)
    return replace(state, scores=scores, history=state.history + (record,))


class EptaResult(Enum):
    ONGOING = "ongoing"
    WON = "won"
    LOST = "lost"


@dataclass(frozen=True)
class EptaOutcome:
    result: EptaResult
    hand: Optional[HandId] = None  # the hand that won or busted

    @property
    def terminal(self) -> bool:
        return self.result is not EptaResult.ONGOING


WINNING_SUM = 7


@dataclass(frozen=True)
class EptaState:
    left: HandId
    right: HandId
    sums: dict[HandId, int]
    turn: HandId
    history: tuple[tuple[HandId, int], ...] = ()
    outcome: EptaOutcome = EptaOutcome(EptaResult.ONGOING)

    @classmethod
    def new(cls, left: HandId, right: HandId, first: Optional[HandId] = None) -> "EptaState":
        # The right hand deals first, like the dealer it mimics.
        return cls(left=left, right=right, sums={left: 0, right: 0},
                   turn=first or right)

    @property
    def finished(self) -> bool:
        return self.outcome.terminal

    def other(self, hand: HandId) -> HandId:
        return self.left if hand is self.right or hand == self.right else self.right


def epta_apply(state: EptaState, n: int) -> EptaState:
    """Reveal the number n on the hand whose turn it is."""
    if state.finished:
        raise GameOver("the game already ended")
    if n < 0:
        raise ValueError("numbers are non-negative")
    hand = state.turn
    sums = dict(state.sums)
    sums[hand] += n
    history = state.history + ((hand, n),)
    if sums[hand] == WINNING_SUM:
        outcome = EptaOutcome(EptaResult.WON, hand)
    elif sums[hand] > WINNING_SUM:
        outcome = EptaOutcome(EptaResult.LOST, hand)
    else:
        return replace(state, sums=sums, history=history, turn=state.other(hand))
    return replace(state, sums=sums, history=history, outcome=outcome)


@dataclass(frozen=True)
class IdioState:
    struck: frozenset[Gesture] = frozenset()
    round: int = 0
    strike_threshold: int = 2

    @property
    def complete(self) -> bool:
        return len(self.struck) == len(GESTURE_ORDER)

    @property
    def remaining(self) -> tuple[Gesture, ...]:
        return tuple(g for g in GESTURE_ORDER if g not in self.struck)


def idio_apply(state: IdioState, shown: Sequence[Gesture]) -> IdioState:
    """Strike off any gesture shown by at least strike_threshold hands at once."""
    already = [g for g in shown if g in state.struck]
    if already:
        raise StruckGestureShown(f"{already[0].value} is already struck off")
    newly = {g for g in set(shown) if list(shown).count(g) >= state.strike_threshold}
    return replace(state, struck=state.struck | newly, round=state.round + 1)


GameState = Union[GodaiState, EptaState, IdioState]


def draw_gesture(stream: SeededStream, game: GameKind,
                 state: Optional[GameState] = None) -> Gesture:
    """Draw the next gesture for one hand.

    Uniform over all five gestures; the matching game excludes struck
    gestures (uniform over the remainder).  Memoryless by construction —
    nothing but the stream and the struck set feeds the draw.
    """
    if game is GameKind.IDIO:
        assert isinstance(state, IdioState)
        candidates = state.remaining
        if not candidates:
            raise NoGesturesRemaining("all five gestures are struck off")
        return candidates[stream.randbelow(len(candidates))]
    return GESTURE_ORDER[stream.randbelow(len(GESTURE_ORDER))]


def new_game(kind: GameKind, mode: GodaiMode, left: HandId, right: HandId,
             rules: GameRules) -> GameState:
    if kind is GameKind.GODAI:
        return GodaiState.new(mode, left, right)
    if kind is GameKind.EPTA:
        return EptaState.new(left, right)
    return IdioState(strike_threshold=rules.strike_threshold)


def game_finished(state: GameState) -> bool:
    if isinstance(state, IdioState):
        return state.complete
    return state.finished
