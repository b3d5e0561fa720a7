"""The session control loop: phases, timers, pause/resume, safety cuts."""

import itertools

import pytest

from thea.config import GameRules, SoundMode, TimingConfig
from thea.control import (AppendLog, ArmTimer, ControlState, HideResult,
                          KillSwitch, NotifyUsageLimit, Phase, PhaseState,
                          PlayCountdownSound, PlayFirstPitch, PlaySecondPitch,
                          RevealPressed, SendActuate, SendStopAll,
                          ShowBreathing, ShowCountdown, ShowResult,
                          SkipBreathing, StartPressed, TimerElapsed,
                          UsageLimitReached, Voice, VoiceCommand, advance)
from thea.errors import InvalidEvent
from thea.games import GodaiMode
from thea.gestures import GameKind, Gesture, HandId, Side

LEFT = HandId(Side.LEFT, "ayu")
RIGHT = HandId(Side.RIGHT, "bren")


class ScriptedDraws:
    """Gesture source dealing a fixed sequence."""

    def __init__(self, *gestures: Gesture):
        self.queue = list(gestures)

    def draw(self, kind, game):
        return self.queue.pop(0) if self.queue else Gesture.OPEN_PALM


def fresh(game=GameKind.GODAI, mode=GodaiMode.BEST_OF_3,
          sound=SoundMode.TWO_PITCH) -> ControlState:
    return ControlState.new(game, mode, GameRules.default(), TimingConfig(),
                            sound, LEFT, RIGHT)


def step(state, event, draws=None, now=0):
    return advance(state, event, now, draws or ScriptedDraws())


def drive_to(state, target: Phase, draws=None, guard=60):
    """Fire armed timers until the loop enters the target phase."""
    draws = draws or ScriptedDraws()
    for _ in range(guard):
        if state.phase.kind is target:
            return state
        assert state.armed_id, f"stuck in {state.phase.label()} with no timer"
        state, _ = advance(state, TimerElapsed(state.armed_id), 0, draws)
    raise AssertionError(f"never reached {target} (at {state.phase.label()})")


def effects_of(kind, effects):
    return [e for e in effects if isinstance(e, kind)]


# -- onboarding --------------------------------------------------------------

def test_start_enters_breathing_with_a_thirty_second_cap():
    state, effects = step(fresh(), StartPressed())
    assert state.phase.kind is Phase.BREATHING
    assert effects_of(ShowBreathing, effects)
    (timer,) = effects_of(ArmTimer, effects)
    assert timer.delay_ms == 30_000


def test_skip_breathing_enters_countdown_at_three():
    state, _ = step(fresh(), StartPressed())
    state, effects = step(state, SkipBreathing())
    assert state.phase.kind is Phase.COUNTDOWN
    assert state.phase.tick == 3
    assert [e.tick for e in effects_of(ShowCountdown, effects)] == [3]
    assert [e.tick for e in effects_of(PlayCountdownSound, effects)] == [3]
    (timer,) = effects_of(ArmTimer, effects)
    assert timer.delay_ms == 1_000


def test_breathing_times_out_into_countdown():
    state, _ = step(fresh(), StartPressed())
    state, effects = step(state, TimerElapsed(state.armed_id))
    assert state.phase.kind is Phase.COUNTDOWN
    assert state.phase.tick == 3


def test_countdown_ticks_three_two_one_then_awaits_round():
    state, _ = step(fresh(), StartPressed())
    state, _ = step(state, SkipBreathing())
    ticks = [state.phase.tick]
    for _ in range(2):
        state, effects = step(state, TimerElapsed(state.armed_id))
        ticks.append(state.phase.tick)
    assert ticks == [3, 2, 1]
    state, _ = step(state, TimerElapsed(state.armed_id))
    assert state.phase.kind is Phase.AWAIT_ROUND


def test_start_only_valid_from_idle_or_completed():
    state, _ = step(fresh(), StartPressed())
    with pytest.raises(InvalidEvent):
        step(state, StartPressed())


# -- one round ---------------------------------------------------------------

def test_round_begins_with_first_pitch_then_actuates_for_two_seconds():
    draws = ScriptedDraws(Gesture.THREE_FINGER, Gesture.WRIST_INWARD)
    state = drive_to(step(fresh(), StartPressed())[0], Phase.AWAIT_ROUND)
    state, effects = step(state, TimerElapsed(state.armed_id), draws)
    assert state.phase.kind is Phase.FIRST_PITCH
    assert effects_of(PlayFirstPitch, effects)
    (timer,) = effects_of(ArmTimer, effects)
    assert timer.delay_ms == 500
    state, effects = step(state, TimerElapsed(state.armed_id))
    assert state.phase.kind is Phase.ACTUATING
    sends = effects_of(SendActuate, effects)
    assert [(s.hand, s.channel, s.duration_ms) for s in sends] == \
        [(LEFT, 1, 2000), (RIGHT, 3, 2000)]
    (timer,) = effects_of(ArmTimer, effects)
    assert timer.delay_ms == 2_000


def test_two_pitch_mode_plays_a_pitch_per_hand():
    draws = ScriptedDraws(Gesture.THREE_FINGER, Gesture.WRIST_INWARD)
    state = drive_to(step(fresh(), StartPressed())[0], Phase.AWAIT_ROUND)
    state, _ = step(state, TimerElapsed(state.armed_id), draws)
    state, effects = step(state, TimerElapsed(state.armed_id))
    pitches = effects_of(PlaySecondPitch, effects)
    assert [p.gesture for p in pitches] == [Gesture.THREE_FINGER, Gesture.WRIST_INWARD]


def test_first_pitch_only_mode_keeps_lead_but_mutes_second_pitch():
    draws = ScriptedDraws(Gesture.THREE_FINGER, Gesture.WRIST_INWARD)
    state = drive_to(step(fresh(sound=SoundMode.FIRST_PITCH_ONLY), StartPressed())[0],
                     Phase.AWAIT_ROUND)
    state, effects = step(state, TimerElapsed(state.armed_id), draws)
    assert state.phase.kind is Phase.FIRST_PITCH
    assert effects_of(PlayFirstPitch, effects)
    state, effects = step(state, TimerElapsed(state.armed_id))
    assert effects_of(PlaySecondPitch, effects) == []


def test_sound_off_skips_the_first_pitch_phase_entirely():
    draws = ScriptedDraws(Gesture.THREE_FINGER, Gesture.WRIST_INWARD)
    state = drive_to(step(fresh(sound=SoundMode.OFF), StartPressed())[0],
                     Phase.AWAIT_ROUND)
    state, effects = step(state, TimerElapsed(state.armed_id), draws)
    assert state.phase.kind is Phase.ACTUATING  # no FIRST_PITCH stop
    assert effects_of(PlayFirstPitch, effects) == []
    assert effects_of(PlaySecondPitch, effects) == []
    assert len(effects_of(SendActuate, effects)) == 2


def test_open_palm_plan_sends_nothing_but_still_sings():
    draws = ScriptedDraws(Gesture.OPEN_PALM, Gesture.OPEN_PALM)
    state = drive_to(step(fresh(), StartPressed())[0], Phase.AWAIT_ROUND)
    state, _ = step(state, TimerElapsed(state.armed_id), draws)
    state, effects = step(state, TimerElapsed(state.armed_id))
    assert effects_of(SendActuate, effects) == []
    assert len(effects_of(PlaySecondPitch, effects)) == 2


def test_epta_round_plans_exactly_one_hand():
    draws = ScriptedDraws(Gesture.THREE_FINGER)
    state = drive_to(step(fresh(GameKind.EPTA, GodaiMode.FREE_PLAY),
                          StartPressed())[0], Phase.AWAIT_ROUND)
    state, _ = step(state, TimerElapsed(state.armed_id), draws)
    state, effects = step(state, TimerElapsed(state.armed_id))
    sends = effects_of(SendActuate, effects)
    assert len(sends) == 1
    assert sends[0].hand == RIGHT  # dealer's turn comes first


def test_actuation_window_closes_into_interpret_with_the_result():
    draws = ScriptedDraws(Gesture.WRIST_OUTWARD, Gesture.WRIST_INWARD)
    state = drive_to(step(fresh(), StartPressed())[0], Phase.ACTUATING, draws)
    state, effects = step(state, TimerElapsed(state.armed_id))
    assert state.phase.kind is Phase.INTERPRET_WINDOW
    assert state.last_result is not None
    assert state.last_result.detail["scores"] == {"left": 1, "right": 0}
    (note,) = [e for e in effects_of(AppendLog, effects)
               if e.kind == "round_result"]
    assert note.data["detail"]["outcome"] == "left_wins"
    (timer,) = effects_of(ArmTimer, effects)
    assert timer.delay_ms == 3_000


def test_interpret_window_expires_into_the_next_round():
    state = drive_to(step(fresh(), StartPressed())[0], Phase.INTERPRET_WINDOW)
    state, _ = step(state, TimerElapsed(state.armed_id))
    assert state.phase.kind is Phase.AWAIT_ROUND


# -- reveal -------------------------------------------------------------------

def test_reveal_shows_the_result_for_two_seconds():
    state = drive_to(step(fresh(), StartPressed())[0], Phase.INTERPRET_WINDOW)
    state, effects = step(state, RevealPressed())
    assert state.phase.kind is Phase.REVEALED
    (shown,) = effects_of(ShowResult, effects)
    assert shown.duration_ms == 2_000
    assert shown.result == state.last_result
    (timer,) = effects_of(ArmTimer, effects)
    assert timer.delay_ms == 2_000


def test_reveal_window_hides_then_continues():
    state = drive_to(step(fresh(), StartPressed())[0], Phase.INTERPRET_WINDOW)
    state, _ = step(state, RevealPressed())
    state, effects = step(state, TimerElapsed(state.armed_id))
    assert isinstance(effects[0], HideResult)
    assert state.phase.kind is Phase.AWAIT_ROUND


def test_reveal_outside_interpret_window_is_invalid():
    state = drive_to(step(fresh(), StartPressed())[0], Phase.ACTUATING)
    with pytest.raises(InvalidEvent):
        step(state, RevealPressed())


# -- pause, resume, stop -------------------------------------------------------

def test_pause_during_actuation_stops_and_voids_the_round():
    state = drive_to(step(fresh(), StartPressed())[0], Phase.ACTUATING)
    state, effects = step(state, VoiceCommand(Voice.PAUSE))
    assert state.phase.kind is Phase.PAUSED
    assert state.phase.resume_to.kind is Phase.AWAIT_ROUND
    assert isinstance(effects[0], SendStopAll)  # stop precedes everything
    assert state.plan is None


def test_pause_elsewhere_resumes_where_it_left_off():
    state = drive_to(step(fresh(), StartPressed())[0], Phase.INTERPRET_WINDOW)
    state, _ = step(state, VoiceCommand(Voice.PAUSE))
    assert state.phase.resume_to.kind is Phase.INTERPRET_WINDOW
    state, effects = step(state, VoiceCommand(Voice.RESUME))
    assert state.phase.kind is Phase.INTERPRET_WINDOW
    assert effects_of(ArmTimer, effects)  # window restarts in full


def test_paused_countdown_resumes_at_its_tick():
    state = drive_to(step(fresh(), StartPressed())[0], Phase.COUNTDOWN)
    state, _ = step(state, TimerElapsed(state.armed_id))  # tick 3 -> 2
    assert state.phase.tick == 2
    state, _ = step(state, VoiceCommand(Voice.PAUSE))
    state, _ = step(state, VoiceCommand(Voice.RESUME))
    assert state.phase.kind is Phase.COUNTDOWN
    assert state.phase.tick == 2


def test_resume_without_pause_is_invalid():
    state = drive_to(step(fresh(), StartPressed())[0], Phase.AWAIT_ROUND)
    with pytest.raises(InvalidEvent):
        step(state, VoiceCommand(Voice.RESUME))


def test_stop_completes_the_session_with_a_stop_all():
    state = drive_to(step(fresh(), StartPressed())[0], Phase.ACTUATING)
    state, effects = step(state, VoiceCommand(Voice.STOP))
    assert state.phase.kind is Phase.COMPLETED
    assert isinstance(effects[0], SendStopAll)
    assert any(e.kind == "stopped" for e in effects_of(AppendLog, effects))


def test_stop_while_revealed_hides_the_result():
    state = drive_to(step(fresh(), StartPressed())[0], Phase.INTERPRET_WINDOW)
    state, _ = step(state, RevealPressed())
    state, effects = step(state, VoiceCommand(Voice.STOP))
    assert isinstance(effects[0], SendStopAll)
    assert effects_of(HideResult, effects)


def test_stop_from_idle_is_invalid():
    with pytest.raises(InvalidEvent):
        step(fresh(), VoiceCommand(Voice.STOP))


# -- kill switch ----------------------------------------------------------------

def all_reachable_phase_states():
    base = step(fresh(), StartPressed())[0]
    samples = [fresh(), base]
    for target in (Phase.COUNTDOWN, Phase.AWAIT_ROUND, Phase.FIRST_PITCH,
                   Phase.ACTUATING, Phase.INTERPRET_WINDOW):
        samples.append(drive_to(step(fresh(), StartPressed())[0], target))
    revealed, _ = step(drive_to(step(fresh(), StartPressed())[0],
                                Phase.INTERPRET_WINDOW), RevealPressed())
    samples.append(revealed)
    paused, _ = step(revealed, VoiceCommand(Voice.PAUSE))
    samples.append(paused)
    stopped, _ = step(drive_to(step(fresh(), StartPressed())[0],
                               Phase.AWAIT_ROUND), VoiceCommand(Voice.STOP))
    samples.append(stopped)
    return samples


def test_kill_switch_from_every_phase_reaches_safe_off_stop_first():
    for state in all_reachable_phase_states():
        new, effects = step(state, KillSwitch(LEFT))
        assert new.phase.kind is Phase.SAFE_OFF, state.phase.label()
        assert isinstance(effects[0], SendStopAll)


def test_kill_while_revealed_also_hides():
    state = drive_to(step(fresh(), StartPressed())[0], Phase.INTERPRET_WINDOW)
    state, _ = step(state, RevealPressed())
    _, effects = step(state, KillSwitch(RIGHT))
    assert isinstance(effects[0], SendStopAll)
    assert effects_of(HideResult, effects)


def test_safe_off_absorbs_kill_and_rejects_everything_else():
    state, _ = step(drive_to(step(fresh(), StartPressed())[0],
                             Phase.ACTUATING), KillSwitch(LEFT))
    again, effects = step(state, KillSwitch(LEFT))
    assert again.phase.kind is Phase.SAFE_OFF
    assert effects == ()
    for event in (StartPressed(), SkipBreathing(), RevealPressed(),
                  VoiceCommand(Voice.RESUME), VoiceCommand(Voice.STOP),
                  TimerElapsed(99)):
        with pytest.raises(InvalidEvent):
            step(state, event)


# -- timers and bookkeeping -----------------------------------------------------

def test_stale_timer_is_a_silent_no_op():
    state = drive_to(step(fresh(), StartPressed())[0], Phase.ACTUATING)
    stale_id = state.armed_id
    state, _ = step(state, VoiceCommand(Voice.PAUSE))  # disarms
    new, effects = step(state, TimerElapsed(stale_id))
    assert new == state
    assert effects == ()


def test_single_armed_deadline_ids_are_unique():
    state, effects = step(fresh(), StartPressed())
    seen = {t.deadline_id for t in effects_of(ArmTimer, effects)}
    draws = ScriptedDraws()
    for _ in range(30):
        if not state.armed_id:
            break
        state, effects = step(state, TimerElapsed(state.armed_id), draws)
        for t in effects_of(ArmTimer, effects):
            assert t.deadline_id not in seen
            seen.add(t.deadline_id)
        assert len([t for t in effects_of(ArmTimer, effects)]) <= 1


def test_usage_limit_event_notifies_and_logs():
    state = drive_to(step(fresh(), StartPressed())[0], Phase.ACTUATING)
    new, effects = step(state, UsageLimitReached("left"))
    assert new.phase == state.phase  # informational, not a phase change
    assert effects_of(NotifyUsageLimit, effects)
    assert any(e.kind == "usage_limit" for e in effects_of(AppendLog, effects))


# -- match end and rematch ---------------------------------------------------

def play_one_match(state=None):
    """Drive a best-of-3 duel to completion with fixed alternating draws."""
    state = state or step(fresh(), StartPressed())[0]
    draws = ScriptedDraws(*itertools.islice(itertools.cycle(
        [Gesture.WRIST_OUTWARD, Gesture.WRIST_INWARD]), 40))  # left always wins
    guard = 100
    while state.phase.kind is not Phase.COMPLETED and guard:
        state, _ = advance(state, TimerElapsed(state.armed_id), 0, draws)
        guard -= 1
    return state


def test_match_win_completes_the_session():
    state = play_one_match()
    assert state.phase.kind is Phase.COMPLETED
    assert state.game.winner == LEFT
    assert state.game.scores[LEFT] == 2


def test_completed_session_accepts_a_rematch():
    state = play_one_match()
    state, effects = step(state, StartPressed())
    assert state.phase.kind is Phase.BREATHING
    assert state.game.scores == {LEFT: 0, RIGHT: 0}
    assert state.rounds_planned == 0
    assert effects_of(ShowBreathing, effects)
