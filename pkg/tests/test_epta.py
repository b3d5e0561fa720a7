"""The sum-to-seven game: turn order, wins, busts, reachability."""

import pytest

from thea.errors import GameOver
from thea.games import (WINNING_SUM, EptaResult, EptaState, epta_apply)


def test_right_hand_deals_first(hands):
    left, right = hands
    assert EptaState.new(left, right).turn == right


def test_turns_alternate_while_ongoing(hands):
    left, right = hands
    state = EptaState.new(left, right)
    state = epta_apply(state, 1)
    assert state.turn == left
    state = epta_apply(state, 1)
    assert state.turn == right


def test_golden_interleaved_game(hands):
    # right reveals 1, 0, 1 and left reveals 5, 0, 2: left lands exactly
    # on seven and wins; any further reveal is an error.
    left, right = hands
    state = EptaState.new(left, right)
    for n in (1, 5, 0, 0, 1, 2):
        state = epta_apply(state, n)
    assert state.sums[left] == 7
    assert state.sums[right] == 2
    assert state.outcome.result is EptaResult.WON
    assert state.outcome.hand == left
    assert state.finished
    with pytest.raises(GameOver):
        epta_apply(state, 0)


def test_exact_seven_wins_immediately(hands):
    left, right = hands
    state = EptaState.new(left, right)
    state = epta_apply(state, 7)  # right's first reveal
    assert state.outcome.result is EptaResult.WON
    assert state.outcome.hand == right


def test_overshoot_busts_the_overshooting_hand(hands):
    left, right = hands
    state = EptaState.new(left, right)
    state = epta_apply(state, 6)   # right: 6
    state = epta_apply(state, 0)   # left: 0
    state = epta_apply(state, 5)   # right: 11, busted
    assert state.sums[right] == 11
    assert state.outcome.result is EptaResult.LOST
    assert state.outcome.hand == right


def test_zero_keeps_the_game_alive(hands):
    left, right = hands
    state = EptaState.new(left, right)
    for _ in range(20):
        state = epta_apply(state, 0)
    assert not state.finished
    assert state.sums == {left: 0, right: 0}


def test_negative_numbers_rejected(hands):
    with pytest.raises(ValueError):
        epta_apply(EptaState.new(*hands), -1)


def test_history_records_every_reveal_in_order(hands):
    left, right = hands
    state = EptaState.new(left, right)
    for n in (1, 5, 0):
        state = epta_apply(state, n)
    assert state.history == ((right, 1), (left, 5), (right, 0))


def test_reachability_sums_are_bounded(rules, hands):
    # Brute-force reachability oracle: expanding every outcome sequence
    # over the game's number set to depth 12, no hand's sum ever exceeds
    # 6 + max(number set) — a bust can overshoot by at most one reveal.
    numbers = sorted(rules.epta_numbers)
    bound = 6 + max(numbers)
    left, right = hands
    frontier = [EptaState.new(left, right)]
    seen_sums = set()
    max_observed = 0
    for _ in range(12):
        nxt = []
        for state in frontier:
            for n in numbers:
                new = epta_apply(state, n)
                top = max(new.sums.values())
                max_observed = max(max_observed, top)
                assert top <= bound, f"sum {top} reachable, bound {bound}"
                if not new.finished:
                    key = (new.sums[left], new.sums[right], new.turn.side)
                    if key not in seen_sums:
                        seen_sums.add(key)
                        nxt.append(new)
        frontier = nxt
    assert max_observed == bound  # 6 then max(numbers) is itself reachable


def test_every_termination_is_won_or_lost_at_the_boundary(rules, hands):
    # Companion property to the bound: terminal means exactly-7 (won) or
    # beyond-7 (lost), never both, never below.
    numbers = sorted(rules.epta_numbers)
    left, right = hands
    frontier = [EptaState.new(left, right)]
    terminals = 0
    for _ in range(8):
        nxt = []
        for state in frontier:
            for n in numbers:
                new = epta_apply(state, n)
                if new.finished:
                    terminals += 1
                    decided = new.outcome.hand
                    if new.outcome.result is EptaResult.WON:
                        assert new.sums[decided] == WINNING_SUM
                    else:
                        assert new.sums[decided] > WINNING_SUM
                else:
                    assert max(new.sums.values()) < WINNING_SUM
                    nxt.append(new)
        frontier = nxt
    assert terminals > 0
