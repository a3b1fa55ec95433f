"""Deterministic seeded randomness.

All seeded operations in the library draw from splitmix64, a published
generator with 64 bits of state, so that a run is reproducible from the
(seed, algorithm-name) pair recorded in output metadata.
"""

from __future__ import annotations

GENERATOR_NAME = "splitmix64"

_MASK = (1 << 64) - 1


class SplitMix64:
    """splitmix64 stream; `seed` may be any integer (reduced to 64 bits)."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform-ish draw in [0, n); modular reduction, bias is irrelevant
        here because only determinism matters."""
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        return self.next_u64() % n

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def unit_below(self, bound: int, p: int) -> int:
        """Draw from [1, bound) coprime to p (bound a power of p, bound > 1)."""
        while True:
            v = self.below(bound)
            if v % p != 0:
                return v
