"""Session state machine: onboarding, gameplay rounds, offboarding.

The loop is a pure transition function over an immutable `ControlState`.
Feeding it an event yields a new state plus an ordered list of effects
(sounds, wire commands, screen changes, timers, log notes) that the host
executes.  Time never leaks in: every delay is an `ArmTimer` effect whose
`TimerElapsed` comes back through the same front door.

The shape of one round::

    AwaitRound --gap--> FirstPitch --lead--> Actuating --2s-->
        InterpretWindow --reveal?--> Revealed --2s--> next round

With sound off there is no warning tone and no FirstPitch phase; the
round jumps straight from AwaitRound into Actuating.  Results stay hidden
unless the reveal button is pressed inside the interpret window.

Safety rules are unconditional: `stop`/`pause`/kill always emit
`SendStopAll` before any other device-bound effect, a pause voids the
in-flight round (resuming re-enters AwaitRound, never half an actuation),
and the kill switch parks the loop in the absorbing `SafeOff`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Optional, Protocol, Union

from thea.config import GameRules, SoundMode, TimingConfig
from thea.errors import InvalidEvent
from thea.games import (
    EptaResult,
    EptaState,
    GameState,
    GodaiMode,
    GodaiState,
    IdioState,
    RoundOutcome,
    draw_gesture,
    epta_apply,
    game_finished,
    godai_apply,
    idio_apply,
    new_game,
)
from thea.gestures import GameKind, Gesture, HandId, meaning_label
from thea.rng import SeededStream


class Phase(Enum):
    IDLE = "idle"
    BREATHING = "breathing"
    COUNTDOWN = "countdown"
    AWAIT_ROUND = "await_round"
    FIRST_PITCH = "first_pitch"
    ACTUATING = "actuating"
    INTERPRET_WINDOW = "interpret_window"
    REVEALED = "revealed"
    PAUSED = "paused"
    COMPLETED = "completed"
    SAFE_OFF = "safe_off"


@dataclass(frozen=True)
class PhaseState:
    """A phase plus its payload: the countdown tick, or where a pause resumes."""

    kind: Phase
    tick: Optional[int] = None
    resume_to: Optional["PhaseState"] = None

    def label(self) -> str:
        if self.kind is Phase.COUNTDOWN:
            return f"countdown_{self.tick}"
        if self.kind is Phase.PAUSED:
            return f"paused[{self.resume_to.label()}]"
        return self.kind.value


# -- events ----------------------------------------------------------------

class Voice(Enum):
    STOP = "stop"
    PAUSE = "pause"
    RESUME = "resume"


@dataclass(frozen=True)
class StartPressed:
    pass


@dataclass(frozen=True)
class SkipBreathing:
    pass


@dataclass(frozen=True)
class TimerElapsed:
    deadline_id: int


@dataclass(frozen=True)
class VoiceCommand:
    command: Voice


@dataclass(frozen=True)
class RevealPressed:
    pass


@dataclass(frozen=True)
class ActuationAcked:
    hand: HandId
    complete: bool


@dataclass(frozen=True)
class KillSwitch:
    hand: HandId


@dataclass(frozen=True)
class UsageLimitReached:
    device_id: str


Event = Union[StartPressed, SkipBreathing, TimerElapsed, VoiceCommand,
              RevealPressed, ActuationAcked, KillSwitch, UsageLimitReached]


# -- effects -----------------------------------------------------------------

@dataclass(frozen=True)
class PlayFirstPitch:
    pass


@dataclass(frozen=True)
class PlaySecondPitch:
    gesture: Gesture


@dataclass(frozen=True)
class PlayCountdownSound:
    tick: int


@dataclass(frozen=True)
class SendActuate:
    hand: HandId
    channel: int
    duration_ms: int


@dataclass(frozen=True)
class SendStopAll:
    pass


@dataclass(frozen=True)
class ShowBreathing:
    pass


@dataclass(frozen=True)
class ShowCountdown:
    tick: int


@dataclass(frozen=True)
class ShowResult:
    result: "RoundResult"
    duration_ms: int


@dataclass(frozen=True)
class HideResult:
    pass


@dataclass(frozen=True)
class ArmTimer:
    deadline_id: int
    delay_ms: int


@dataclass(frozen=True)
class AppendLog:
    kind: str
    data: dict


@dataclass(frozen=True)
class NotifyUsageLimit:
    device_id: str


Effect = Union[PlayFirstPitch, PlaySecondPitch, PlayCountdownSound,
               SendActuate, SendStopAll, ShowBreathing, ShowCountdown,
               ShowResult, HideResult, ArmTimer, AppendLog, NotifyUsageLimit]


# -- round bookkeeping -------------------------------------------------------

class GestureSource(Protocol):
    """Where a round's gestures come from."""

    def draw(self, kind: GameKind, game: GameState) -> Gesture: ...


class RandomDraw:
    """The normal source: uniform draws from one seeded stream."""

    def __init__(self, stream: SeededStream) -> None:
        self.stream = stream

    def draw(self, kind: GameKind, game: GameState) -> Gesture:
        return draw_gesture(self.stream, kind, game)


class DealtDraw:
    """Deals a fixed gesture sequence first, then falls back to another
    source.  Lets a known hand run through the entire engine."""

    def __init__(self, prefix: Iterable[Gesture], fallback: GestureSource) -> None:
        self._queue = deque(prefix)
        self.fallback = fallback

    def draw(self, kind: GameKind, game: GameState) -> Gesture:
        if self._queue:
            return self._queue.popleft()
        return self.fallback.draw(kind, game)


@dataclass(frozen=True)
class PlanEntry:
    hand: HandId
    gesture: Gesture
    channel: Optional[int]  # None: nothing to drive (the relaxed open palm)


@dataclass(frozen=True)
class RoundPlan:
    number: int
    entries: tuple[PlanEntry, ...]


@dataclass(frozen=True)
class ResultEntry:
    hand: HandId
    gesture: Gesture
    meaning: str


@dataclass(frozen=True)
class RoundResult:
    number: int
    entries: tuple[ResultEntry, ...]
    summary: str
    detail: dict

    def to_dict(self) -> dict:
        return {
            "round": self.number,
            "hands": [
                {"side": e.hand.side.value, "wearer": e.hand.wearer,
                 "gesture": e.gesture.value, "meaning": e.meaning}
                for e in self.entries
            ],
            "summary": self.summary,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class ControlState:
    """Everything the transition function needs, immutably."""

    phase: PhaseState
    kind: GameKind
    mode: GodaiMode
    rules: GameRules
    timing: TimingConfig
    sound: SoundMode
    left: HandId
    right: HandId
    game: GameState
    plan: Optional[RoundPlan] = None
    last_result: Optional[RoundResult] = None
    armed_id: int = 0  # 0: no live deadline
    armed_purpose: Optional[str] = None
    next_timer_id: int = 1
    rounds_planned: int = 0

    @classmethod
    def new(cls, kind: GameKind, mode: GodaiMode, rules: GameRules,
            timing: TimingConfig, sound: SoundMode,
            left: HandId, right: HandId) -> "ControlState":
        return cls(phase=PhaseState(Phase.IDLE), kind=kind, mode=mode,
                   rules=rules, timing=timing, sound=sound, left=left,
                   right=right, game=new_game(kind, mode, left, right, rules))


def plan_round(state: ControlState, draws: GestureSource) -> RoundPlan:
    """Draw this round's gestures. Left hand draws before right, always."""
    game = state.game
    if isinstance(game, EptaState):
        hands = (game.turn,)
    else:
        hands = (state.left, state.right)
    entries = []
    for hand in hands:
        gesture = draws.draw(state.kind, game)
        entries.append(PlanEntry(hand, gesture, state.rules.channel_of[gesture]))
    return RoundPlan(state.rounds_planned + 1, tuple(entries))


def apply_plan(state: ControlState) -> tuple[GameState, RoundResult]:
    """Fold the actuated gestures into the game and describe the round."""
    plan = state.plan
    assert plan is not None
    game, rules = state.game, state.rules
    entries = tuple(
        ResultEntry(e.hand, e.gesture, meaning_label(e.gesture, state.kind, rules))
        for e in plan.entries
    )
    if isinstance(game, GodaiState):
        by_hand = {e.hand: e.gesture for e in plan.entries}
        game = godai_apply(game, by_hand[state.left], by_hand[state.right], rules)
        outcome = game.history[-1].outcome
        summary = {RoundOutcome.LEFT_WINS: "left takes the round",
                   RoundOutcome.RIGHT_WINS: "right takes the round",
                   RoundOutcome.TIE: "tie, replay"}[outcome]
        detail = {
            "outcome": outcome.value,
            "scores": {h.side.value: s for h, s in game.scores.items()},
            "match_over": game.finished,
        }
        if game.winner is not None:
            detail["winner"] = game.winner.side.value
    elif isinstance(game, EptaState):
        entry = plan.entries[0]
        game = epta_apply(game, rules.number_of[entry.gesture])
        res = game.outcome
        if res.result is EptaResult.WON:
            summary = f"{res.hand.side.value} hits seven"
        elif res.result is EptaResult.LOST:
            summary = f"{res.hand.side.value} busts"
        else:
            summary = f"{entry.hand.side.value} shows {rules.number_of[entry.gesture]}"
        detail = {
            "outcome": res.result.value,
            "sums": {h.side.value: s for h, s in game.sums.items()},
        }
        if res.hand is not None:
            detail["decided_by"] = res.hand.side.value
    else:
        assert isinstance(game, IdioState)
        before = game.struck
        game = idio_apply(game, [e.gesture for e in plan.entries])
        struck_now = sorted(g.value for g in game.struck - before)
        summary = (f"struck {', '.join(struck_now)}" if struck_now
                   else "no match, nothing struck")
        detail = {
            "struck_now": struck_now,
            "struck_total": sorted(g.value for g in game.struck),
            "complete": game.complete,
        }
    return game, RoundResult(plan.number, entries, summary, detail)


def _arm(state: ControlState, purpose: str, delay_ms: int,
         effects: list) -> ControlState:
    deadline = state.next_timer_id
    effects.append(ArmTimer(deadline, delay_ms))
    return replace(state, armed_id=deadline, armed_purpose=purpose,
                   next_timer_id=deadline + 1)


def _disarm(state: ControlState) -> ControlState:
    return replace(state, armed_id=0, armed_purpose=None)


def _enter_breathing(state: ControlState) -> tuple[ControlState, list]:
    effects: list = [ShowBreathing()]
    state = replace(state, phase=PhaseState(Phase.BREATHING))
    return _arm(state, "breathing", state.timing.breathing_max_ms, effects), effects


def _enter_countdown(state: ControlState, tick: int) -> tuple[ControlState, list]:
    effects = [ShowCountdown(tick), PlayCountdownSound(tick)]
    state = replace(state, phase=PhaseState(Phase.COUNTDOWN, tick=tick))
    return _arm(state, "countdown", state.timing.countdown_tick_ms, effects), effects


def _enter_await_round(state: ControlState) -> tuple[ControlState, list]:
    effects: list = []
    state = replace(state, phase=PhaseState(Phase.AWAIT_ROUND), plan=None)
    return _arm(state, "await_round", state.timing.inter_round_gap_ms, effects), effects


def _begin_round(state: ControlState, draws: GestureSource) -> tuple[ControlState, list]:
    plan = plan_round(state, draws)
    state = replace(state, plan=plan, rounds_planned=plan.number)
    if state.sound is SoundMode.OFF:
        return _enter_actuating(state)
    effects = [PlayFirstPitch()]
    state = replace(state, phase=PhaseState(Phase.FIRST_PITCH))
    return _arm(state, "first_pitch", state.timing.first_pitch_lead_ms, effects), effects


def _enter_actuating(state: ControlState) -> tuple[ControlState, list]:
    assert state.plan is not None
    effects: list = []
    for entry in state.plan.entries:
        if entry.channel is not None:
            effects.append(SendActuate(entry.hand, entry.channel,
                                       state.timing.actuation_ms))
    if state.sound is SoundMode.TWO_PITCH:
        for entry in state.plan.entries:
            effects.append(PlaySecondPitch(entry.gesture))
    effects.append(AppendLog("round_started", {
        "round": state.plan.number,
        "hands": [
            {"side": e.hand.side.value, "gesture": e.gesture.value,
             "channel": e.channel}
            for e in state.plan.entries
        ],
    }))
    state = replace(state, phase=PhaseState(Phase.ACTUATING))
    return _arm(state, "actuation", state.timing.actuation_ms, effects), effects


def _enter_interpret(state: ControlState) -> tuple[ControlState, list]:
    game, result = apply_plan(state)
    effects = [AppendLog("round_result", result.to_dict())]
    state = replace(state, game=game, last_result=result,
                    phase=PhaseState(Phase.INTERPRET_WINDOW))
    return _arm(state, "interpret", state.timing.interpret_window_ms, effects), effects


def _enter_revealed(state: ControlState) -> tuple[ControlState, list]:
    assert state.last_result is not None
    effects = [ShowResult(state.last_result, state.timing.reveal_ms)]
    state = replace(state, phase=PhaseState(Phase.REVEALED))
    return _arm(state, "reveal", state.timing.reveal_ms, effects), effects


def _enter_completed(state: ControlState) -> tuple[ControlState, list]:
    effects = [AppendLog("completed", game_summary(state))]
    state = _disarm(replace(state, phase=PhaseState(Phase.COMPLETED), plan=None))
    return state, effects


def game_summary(state: ControlState) -> dict:
    """JSON-safe scoreboard for the current game state."""
    game = state.game
    if isinstance(game, GodaiState):
        out = {"game": state.kind.value,
               "scores": {h.side.value: s for h, s in game.scores.items()},
               "rounds": len(game.history)}
        if game.winner is not None:
            out["winner"] = game.winner.side.value
        return out
    if isinstance(game, EptaState):
        out = {"game": state.kind.value,
               "sums": {h.side.value: s for h, s in game.sums.items()},
               "outcome": game.outcome.result.value,
               "turns": len(game.history)}
        if game.outcome.hand is not None:
            out["decided_by"] = game.outcome.hand.side.value
        return out
    assert isinstance(game, IdioState)
    return {"game": state.kind.value, "rounds": game.round,
            "struck": sorted(g.value for g in game.struck),
            "complete": game.complete}


def _after_round(state: ControlState) -> tuple[ControlState, list]:
    if game_finished(state.game):
        return _enter_completed(state)
    return _enter_await_round(state)


def _resume(state: ControlState, draws: GestureSource) -> tuple[ControlState, list]:
    target = state.phase.resume_to
    assert target is not None
    state = replace(state, phase=target)
    kind = target.kind
    if kind is Phase.BREATHING:
        return _enter_breathing(state)
    if kind is Phase.COUNTDOWN:
        return _enter_countdown(state, target.tick)
    if kind is Phase.AWAIT_ROUND:
        return _enter_await_round(state)
    if kind is Phase.INTERPRET_WINDOW:
        state = replace(state, phase=target)
        effects: list = []
        return _arm(state, "interpret", state.timing.interpret_window_ms, effects), effects
    if kind is Phase.REVEALED:
        return _enter_revealed(state)
    raise AssertionError(f"unresumable phase {kind}")


_VOIDED_BY_PAUSE = (Phase.FIRST_PITCH, Phase.ACTUATING)
_PAUSABLE = (Phase.BREATHING, Phase.COUNTDOWN, Phase.AWAIT_ROUND,
             Phase.FIRST_PITCH, Phase.ACTUATING, Phase.INTERPRET_WINDOW,
             Phase.REVEALED)
_STOPPABLE = _PAUSABLE + (Phase.PAUSED,)


def advance(state: ControlState, event: Event, now_ms: int,
            draws: GestureSource) -> tuple[ControlState, tuple[Effect, ...]]:
    """The transition function. Pure up to draws from the injected stream."""
    phase = state.phase.kind

    # Safety and bookkeeping events cut across the whole phase diagram.
    if isinstance(event, KillSwitch):
        if phase is Phase.SAFE_OFF:
            return state, ()
        effects = [SendStopAll()]
        if phase is Phase.REVEALED:
            effects.append(HideResult())  # keep every ShowResult paired
        effects.append(AppendLog("kill_switch", {"side": event.hand.side.value}))
        return (_disarm(replace(state, phase=PhaseState(Phase.SAFE_OFF), plan=None)),
                tuple(effects))
    if phase is Phase.SAFE_OFF:
        raise InvalidEvent(state.phase.label(), event)
    if isinstance(event, UsageLimitReached):
        return state, (NotifyUsageLimit(event.device_id),
                       AppendLog("usage_limit", {"device": event.device_id}))
    if isinstance(event, ActuationAcked):
        return state, ()  # loss-tolerant: acks inform, timers pace

    if isinstance(event, TimerElapsed):
        if event.deadline_id != state.armed_id:
            return state, ()  # a superseded phase's timer; let it die quietly
        purpose = state.armed_purpose
        state = _disarm(state)
        if purpose == "breathing":
            new, effects = _enter_countdown(state, 3)
        elif purpose == "countdown":
            tick = state.phase.tick
            if tick > 1:
                new, effects = _enter_countdown(state, tick - 1)
            else:
                new, effects = _enter_await_round(state)
        elif purpose == "await_round":
            new, effects = _begin_round(state, draws)
        elif purpose == "first_pitch":
            new, effects = _enter_actuating(state)
        elif purpose == "actuation":
            new, effects = _enter_interpret(state)
        elif purpose == "interpret":
            new, effects = _after_round(state)
        elif purpose == "reveal":
            new, effects = _after_round(state)
            effects = [HideResult()] + effects
        else:
            raise AssertionError(f"unknown deadline purpose {purpose}")
        return new, tuple(effects)

    if isinstance(event, VoiceCommand):
        if event.command is Voice.STOP:
            if phase not in _STOPPABLE:
                raise InvalidEvent(state.phase.label(), event)
            effects = [SendStopAll()]
            if phase is Phase.REVEALED:
                effects.append(HideResult())
            effects.append(AppendLog("stopped", {"at_ms": now_ms}))
            new = _disarm(replace(state, phase=PhaseState(Phase.COMPLETED), plan=None))
            return new, tuple(effects)
        if event.command is Voice.PAUSE:
            if phase not in _PAUSABLE:
                raise InvalidEvent(state.phase.label(), event)
            # An interrupted actuation never resumes midway; the round is
            # voided and replanned fresh after resume.
            resume_to = (PhaseState(Phase.AWAIT_ROUND)
                         if phase in _VOIDED_BY_PAUSE else state.phase)
            effects = [SendStopAll()]
            if phase is Phase.REVEALED:
                effects.append(HideResult())
            effects.append(AppendLog("paused", {"resume_to": resume_to.label()}))
            new = _disarm(replace(
                state, plan=None,
                phase=PhaseState(Phase.PAUSED, resume_to=resume_to)))
            return new, tuple(effects)
        # resume
        if phase is not Phase.PAUSED:
            raise InvalidEvent(state.phase.label(), event)
        new, effects = _resume(state, draws)
        return new, tuple([AppendLog("resumed", {})] + effects)

    if isinstance(event, StartPressed):
        if phase is Phase.IDLE:
            new, effects = _enter_breathing(state)
            return new, tuple(effects)
        if phase is Phase.COMPLETED:
            # Rematch: same hands, same rules, fresh game state.
            game = state.game
            if game_finished(game):
                game = new_game(state.kind, state.mode, state.left,
                                state.right, state.rules)
            state = replace(state, game=game, plan=None, last_result=None,
                            rounds_planned=0)
            new, effects = _enter_breathing(state)
            return new, tuple(effects)
        raise InvalidEvent(state.phase.label(), event)

    if isinstance(event, SkipBreathing):
        if phase is not Phase.BREATHING:
            raise InvalidEvent(state.phase.label(), event)
        new, effects = _enter_countdown(_disarm(state), 3)
        return new, tuple(effects)

    if isinstance(event, RevealPressed):
        if phase is not Phase.INTERPRET_WINDOW:
            raise InvalidEvent(state.phase.label(), event)
        new, effects = _enter_revealed(_disarm(state))
        return new, tuple(effects)

    raise InvalidEvent(state.phase.label(), event)
