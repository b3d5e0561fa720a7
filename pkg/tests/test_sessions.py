"""Session configuration validation and identity."""

import pytest

from thea.config import SoundMode
from thea.errors import InvalidConfig
from thea.games import GodaiMode
from thea.gestures import GameKind, Gesture, Side
from thea.sessions import Assignment, SessionConfig, derive_session_id

from conftest import make_config


def test_epta_and_idio_offer_free_play_only():
    with pytest.raises(InvalidConfig):
        make_config(game=GameKind.EPTA, mode=GodaiMode.BEST_OF_3)
    with pytest.raises(InvalidConfig):
        make_config(game=GameKind.IDIO, mode=GodaiMode.BEST_OF_5)
    make_config(game=GameKind.EPTA, mode=GodaiMode.FREE_PLAY)


def test_godai_best_of_five_solo_is_fine():
    cfg = make_config(mode=GodaiMode.BEST_OF_5, nicknames=("mira",))
    assert cfg.assignment is Assignment.SOLO_TWO_HANDS
    left, right = cfg.hands
    assert left.wearer == right.wearer == "mira"
    assert (left.side, right.side) == (Side.LEFT, Side.RIGHT)


def test_shared_needs_two_nicknames():
    with pytest.raises(InvalidConfig):
        SessionConfig(nicknames=("solo",), game=GameKind.GODAI,
                      mode=GodaiMode.BEST_OF_3, sound=SoundMode.TWO_PITCH,
                      seed=0, assignment=Assignment.SHARED_ONE_HAND_EACH)


def test_solo_takes_exactly_one_nickname():
    with pytest.raises(InvalidConfig):
        SessionConfig(nicknames=("a", "b"), game=GameKind.GODAI,
                      mode=GodaiMode.BEST_OF_3, sound=SoundMode.TWO_PITCH,
                      seed=0, assignment=Assignment.SOLO_TWO_HANDS)


def test_nicknames_must_be_distinct_and_non_blank():
    with pytest.raises(InvalidConfig):
        make_config(nicknames=("a", "a"))
    with pytest.raises(InvalidConfig):
        make_config(nicknames=("a", "  "))


def test_seed_must_fit_sixty_four_bits():
    make_config(seed=2 ** 64 - 1)
    with pytest.raises(InvalidConfig):
        make_config(seed=2 ** 64)
    with pytest.raises(InvalidConfig):
        make_config(seed=-1)


def test_round_trip_preserves_everything():
    cfg = make_config(game=GameKind.IDIO, mode=GodaiMode.FREE_PLAY, seed=777,
                      gesture_script=(Gesture.OPEN_PALM, Gesture.WRIST_INWARD))
    again = SessionConfig.from_dict(cfg.to_dict())
    assert again == cfg


def test_malformed_dict_raises_invalid_config():
    with pytest.raises(InvalidConfig):
        SessionConfig.from_dict({"game": "godai"})
    with pytest.raises(InvalidConfig):
        SessionConfig.from_dict({"nicknames": ["a"], "game": "chess"})


def test_session_id_is_stable_and_input_sensitive():
    cfg = make_config()
    assert derive_session_id(cfg, "") == derive_session_id(cfg, "")
    assert derive_session_id(cfg, "") != derive_session_id(cfg, "0 start")
    assert derive_session_id(cfg, "") != derive_session_id(make_config(seed=43), "")
    assert len(derive_session_id(cfg, "")) == 12
