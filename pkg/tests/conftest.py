"""Shared fixtures for the suite."""

import pytest

from thea.config import GameRules, SoundMode
from thea.games import GodaiMode
from thea.gestures import GameKind, HandId, Side
from thea.sessions import Assignment, SessionConfig


@pytest.fixture
def rules() -> GameRules:
    return GameRules.default()


@pytest.fixture
def hands() -> tuple[HandId, HandId]:
    return HandId(Side.LEFT, "ayu"), HandId(Side.RIGHT, "bren")


def make_config(game=GameKind.GODAI, mode=GodaiMode.BEST_OF_3, seed=42,
                nicknames=("ayu", "bren"), sound=SoundMode.TWO_PITCH,
                **extra) -> SessionConfig:
    """Session config with sane defaults; solo/shared follows nickname count."""
    assignment = (Assignment.SOLO_TWO_HANDS if len(nicknames) == 1
                  else Assignment.SHARED_ONE_HAND_EACH)
    return SessionConfig(nicknames=tuple(nicknames), game=game, mode=mode,
                         sound=sound, seed=seed, assignment=assignment, **extra)
