"""Deterministic EMS hand-game engine with virtual hardware.

Two wrist units play five-gesture chance games against each other; this
package simulates the whole stack — game rules, actuation control loop,
wire protocol, device firmware, transport — on a virtual clock, plus a
live HTTP/WebSocket service on the wall clock.
"""

from thea.config import (DeviceConfig, GameRules, RigConfig, SoundMode,
                         TimingConfig, TransportConfig)
from thea.dominance import DominanceMatrix
from thea.errors import TheaError
from thea.games import EptaOutcome, GodaiMode, RoundOutcome
from thea.gestures import (GESTURE_ORDER, Element, GameKind, Gesture, HandId,
                           Side)
from thea.rng import SeededStream, derive_seed, derive_stream
from thea.runner import SessionRuntime, run_session
from thea.sessions import Assignment, SessionConfig

__version__ = "1.0.0"

__all__ = [
    "Assignment",
    "DeviceConfig",
    "DominanceMatrix",
    "Element",
    "EptaOutcome",
    "GameKind",
    "GameRules",
    "Gesture",
    "GESTURE_ORDER",
    "GodaiMode",
    "HandId",
    "RigConfig",
    "RoundOutcome",
    "SeededStream",
    "SessionConfig",
    "SessionRuntime",
    "Side",
    "SoundMode",
    "TheaError",
    "TimingConfig",
    "TransportConfig",
    "derive_seed",
    "derive_stream",
    "run_session",
    "__version__",
]
