"""Seeded randomness with a stable, documented algorithm identity.

Every random decision in a session comes from one of these streams so that
(config, seed, script) fully determines a run:

* The generator is CPython's Mersenne Twister (``random.Random``), consumed
  only through ``getrandbits`` — the one primitive with a stability
  guarantee across interpreter versions.  ``randbelow`` is classic
  rejection sampling on top of it; ``random`` builds the 53-bit float the
  same way ``random.random`` does.
* Independent consumers (gesture draws, each device's fidelity draws, each
  transport link) get their own stream, seeded by SHA-256 of the master
  seed and a consumer label.  One consumer drawing more or less can never
  shift another consumer's sequence.
"""

from __future__ import annotations

import hashlib
import random


class SeededStream:
    """One deterministic draw sequence."""

    def __init__(self, seed: int):
        self.seed = seed
        self._mt = random.Random(seed)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection sampling on getrandbits."""
        if n <= 0:
            raise ValueError("randbelow() needs n >= 1")
        k = (n - 1).bit_length()
        while True:
            r = self._mt.getrandbits(k) if k else 0
            if r < n:
                return r

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return self._mt.getrandbits(53) / (1 << 53)

    def chance(self, p: float) -> bool:
        """Bernoulli draw; always consumes exactly one float."""
        return self.random() < p

    def randint_inclusive(self, lo: int, hi: int) -> int:
        return lo + self.randbelow(hi - lo + 1)

    def choice(self, seq):
        return seq[self.randbelow(len(seq))]


def derive_seed(master_seed: int, label: str) -> int:
    """Stable 64-bit sub-seed for a named consumer."""
    digest = hashlib.sha256(f"{master_seed}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def derive_stream(master_seed: int, label: str) -> SeededStream:
    return SeededStream(derive_seed(master_seed, label))
