"""Simulated lossy byte link between the controller and one rig.

Frames ride the link as their encoded bytes.  Each send consumes a fixed
number of random draws whatever the outcome, so the seeded stream stays
aligned across runs and a dropped frame costs exactly as much randomness
as a delivered one.
"""

from __future__ import annotations

from typing import Callable, Optional

from thea.clock import Scheduler
from thea.config import TransportConfig
from thea.rng import SeededStream


def plan_delivery(cfg: TransportConfig, now_ms: int,
                  rng: SeededStream) -> tuple[int, ...]:
    """Sample delivery times for one send. Always exactly four draws.

    Empty when dropped; two entries when duplicated, each with its own
    latency sample.
    """
    dropped = rng.chance(cfg.drop_prob)
    duplicated = rng.chance(cfg.duplicate_prob)
    lo, hi = cfg.latency_ms
    first = now_ms + rng.randint_inclusive(lo, hi)
    second = now_ms + rng.randint_inclusive(lo, hi)
    if dropped:
        return ()
    if duplicated:
        return tuple(sorted((first, second)))
    return (first,)


class SimLink:
    """One direction of a device link. Delivers encoded frames via the scheduler."""

    def __init__(self, name: str, cfg: TransportConfig, scheduler: Scheduler,
                 rng: SeededStream,
                 deliver: Callable[[bytes], None]) -> None:
        self.name = name
        self.cfg = cfg
        self.scheduler = scheduler
        self.rng = rng
        self.deliver = deliver
        self.sent = 0
        self.delivered = 0

    def send(self, data: bytes) -> tuple[int, ...]:
        """Queue one encoded frame; returns the planned delivery times."""
        self.sent += 1
        times = plan_delivery(self.cfg, self.scheduler.clock.now_ms(), self.rng)
        for t in times:
            self.scheduler.call_at(t, lambda d=data: self._arrive(d))
        return times

    def _arrive(self, data: bytes) -> None:
        self.delivered += 1
        self.deliver(data)
