"""The five-element dominance relation and its structural validator."""

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from thea.dominance import DominanceMatrix
from thea.errors import ConfigError
from thea.gestures import Element

# Each element beats the next two around the wheel.
WHEEL = (Element.FIRE, Element.METAL, Element.EARTH, Element.WATER, Element.WOOD)


def test_default_matches_the_wheel():
    m = DominanceMatrix.default()
    for i, e in enumerate(WHEEL):
        assert m.beats(e, WHEEL[(i + 1) % 5])
        assert m.beats(e, WHEEL[(i + 2) % 5])


def test_known_duels():
    m = DominanceMatrix.default()
    assert m.beats(Element.METAL, Element.EARTH)
    assert m.beats(Element.FIRE, Element.METAL)
    assert m.beats(Element.WATER, Element.FIRE)
    assert m.beats(Element.WOOD, Element.METAL)
    assert not m.beats(Element.EARTH, Element.METAL)


def test_irreflexive():
    m = DominanceMatrix.default()
    for e in Element:
        assert not m.beats(e, e)


def test_complete_and_antisymmetric():
    m = DominanceMatrix.default()
    for a, b in itertools.combinations(Element, 2):
        assert m.beats(a, b) != m.beats(b, a)  # exactly one direction


def test_regular_two_wins_each():
    m = DominanceMatrix.default()
    for a in Element:
        wins = sum(m.beats(a, b) for b in Element if b is not a)
        assert wins == 2


def test_validate_accepts_the_default():
    DominanceMatrix.default().validate()


def test_validate_rejects_a_dropped_pair():
    pairs = frozenset(p for p in DominanceMatrix.default().pairs
                      if p != (Element.FIRE, Element.METAL))
    with pytest.raises(ConfigError):
        DominanceMatrix(pairs).validate()


def test_validate_rejects_a_reflexive_pair():
    pairs = DominanceMatrix.default().pairs | {(Element.FIRE, Element.FIRE)}
    with pytest.raises(ConfigError):
        DominanceMatrix(frozenset(pairs)).validate()


def test_validate_rejects_both_directions():
    pairs = DominanceMatrix.default().pairs | {(Element.METAL, Element.FIRE)}
    with pytest.raises(ConfigError):
        DominanceMatrix(frozenset(pairs)).validate()


@given(st.permutations(list(Element)))
def test_any_rotation_of_the_wheel_validates(order):
    # Regularity is about shape, not which element sits where: every
    # beats-next-two arrangement passes the validator.
    pairs = set()
    for i, e in enumerate(order):
        pairs.add((e, order[(i + 1) % 5]))
        pairs.add((e, order[(i + 2) % 5]))
    DominanceMatrix(frozenset(pairs)).validate()


@given(st.sampled_from(list(Element)), st.sampled_from(list(Element)))
def test_flipping_one_duel_always_breaks_validation(a, b):
    m = DominanceMatrix.default()
    if a is b:
        return
    winner, loser = (a, b) if m.beats(a, b) else (b, a)
    pairs = (m.pairs - {(winner, loser)}) | {(loser, winner)}
    with pytest.raises(ConfigError):
        DominanceMatrix(frozenset(pairs)).validate()


def test_wins_round_trip():
    m = DominanceMatrix.default()
    again = DominanceMatrix.from_wins(
        {Element(w): [Element(l) for l in losers]
         for w, losers in m.as_wins().items()})
    assert again.pairs == m.pairs
