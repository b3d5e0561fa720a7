"""Time sources and the discrete-event scheduler.

All timing in the engine flows through an injected clock so that a whole
session can run under a virtual clock in microseconds of CPU time and
reproduce byte-identical transcripts.  Live play swaps in the wall clock;
nothing else changes.
"""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol


class Clock(Protocol):
    def now_ms(self) -> int: ...


class VirtualClock:
    """Simulated time. Only the scheduler may move it forward."""

    def __init__(self, start_ms: int = 0) -> None:
        self._now = start_ms

    def now_ms(self) -> int:
        return self._now

    def _advance_to(self, t_ms: int) -> None:
        if t_ms < self._now:
            raise ValueError("time cannot run backwards")
        self._now = t_ms


class WallClock:
    """Monotonic wall time in ms, zeroed at construction."""

    def __init__(self) -> None:
        self._t0 = time.monotonic()

    def now_ms(self) -> int:
        return int((time.monotonic() - self._t0) * 1000)


@dataclass(order=True)
class _Entry:
    at_ms: int
    seq: int
    fn: Callable[[], None] = field(compare=False)
    cancelled: bool = field(compare=False, default=False)


class Handle:
    """Cancellation token for one scheduled callback."""

    __slots__ = ("_entry",)

    def __init__(self, entry: _Entry) -> None:
        self._entry = entry

    @property
    def at_ms(self) -> int:
        return self._entry.at_ms

    def cancel(self) -> None:
        self._entry.cancelled = True

    @property
    def cancelled(self) -> bool:
        return self._entry.cancelled


class Scheduler:
    """Deterministic timed-callback queue over a virtual clock.

    Entries fire in (time, insertion order); equal-time callbacks never
    race.  The scheduler owns the clock: executing an entry first advances
    the clock to its deadline.
    """

    def __init__(self, clock: VirtualClock) -> None:
        self.clock = clock
        self._heap: list[_Entry] = []
        self._seq = itertools.count()

    def call_at(self, t_ms: int, fn: Callable[[], None]) -> Handle:
        if t_ms < self.clock.now_ms():
            raise ValueError(f"cannot schedule into the past ({t_ms}ms)")
        entry = _Entry(t_ms, next(self._seq), fn)
        heapq.heappush(self._heap, entry)
        return Handle(entry)

    def call_after(self, delay_ms: int, fn: Callable[[], None]) -> Handle:
        return self.call_at(self.clock.now_ms() + delay_ms, fn)

    def next_deadline(self) -> Optional[int]:
        while self._heap and self._heap[0].cancelled:
            heapq.heappop(self._heap)
        return self._heap[0].at_ms if self._heap else None

    def run_next(self) -> bool:
        """Advance to and fire the earliest pending entry. False when idle."""
        while self._heap:
            entry = heapq.heappop(self._heap)
            if entry.cancelled:
                continue
            self.clock._advance_to(entry.at_ms)
            entry.fn()
            return True
        return False

    def run_until(self, t_ms: int) -> None:
        """Fire everything due up to and including t_ms, then land there."""
        while True:
            due = self.next_deadline()
            if due is None or due > t_ms:
                break
            self.run_next()
        if self.clock.now_ms() < t_ms:
            self.clock._advance_to(t_ms)

    def run_all(self, limit_ms: Optional[int] = None) -> None:
        """Drain the queue; stop (leaving later entries) at limit_ms if given."""
        while True:
            due = self.next_deadline()
            if due is None or (limit_ms is not None and due > limit_ms):
                return
            self.run_next()
