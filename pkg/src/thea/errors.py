"""Exception hierarchy for the thea package."""


class TheaError(Exception):
    """Base class for all thea errors."""


# --- game rules ---------------------------------------------------------

class GameError(TheaError):
    pass


class AlreadyFinished(GameError):
    """A move was applied to a finished best-of-N match."""


class GameOver(GameError):
    """A reveal was applied to a terminal sum-to-seven game."""


class StruckGestureShown(GameError):
    """A hand showed a gesture that was already struck off."""


class NoGesturesRemaining(GameError):
    """All five gestures are struck; nothing left to draw."""


# --- configuration ------------------------------------------------------

class ConfigError(TheaError):
    """A game/device/service config file violates its invariants."""


# --- control loop -------------------------------------------------------

class InvalidEvent(TheaError):
    """Event is undefined for the current session phase (signalled, not fatal)."""

    def __init__(self, phase, event):
        self.phase = phase
        self.event = event
        super().__init__(f"event {event!r} is not valid in phase {phase!r}")


class ScriptDeadlock(TheaError):
    """A scripted run went quiescent in a phase that still expects input."""


# --- wire protocol ------------------------------------------------------

class ProtocolError(TheaError):
    pass


class PayloadTooLarge(ProtocolError):
    """Frame payload exceeds the 1-byte length field (255)."""


class DurationTooLong(ProtocolError):
    """ACTUATE duration exceeds the 2000 ms safety ceiling."""


# --- device simulator ---------------------------------------------------

class DeviceError(TheaError):
    pass


class UnknownChannel(DeviceError):
    """Channel index outside 1..4."""


class Busy(DeviceError):
    """An actuation is already running on this device."""


class KillSwitchEngaged(DeviceError):
    """Operation requires the kill switch to be off."""


# --- session service ----------------------------------------------------

class ServiceError(TheaError):
    pass


class InvalidConfig(ServiceError):
    """Session config violates its invariants (mode/game mismatch, nicknames...)."""


class DevicesNotCalibrated(ServiceError):
    """A referenced device has uncalibrated channels."""


class UnknownSession(ServiceError):
    pass


class UnknownDevice(ServiceError):
    pass


class DeviceInUse(ServiceError):
    """Device is already bound to another active session."""
