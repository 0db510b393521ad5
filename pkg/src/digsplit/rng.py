"""SplitMix64, the portable PRNG behind every seeded construction.

Stream definition (fixed, so seeds reproduce across platforms)::

    state  <- (state + 0x9E3779B97F4A7C15) mod 2**64
    z      <- state
    z      <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
    z      <- (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2**64
    output <- z ^ (z >> 31)

``below(b)`` rejects outputs ``x < 2**64 mod b`` and returns ``x mod b``.
``sample(pop, k)`` is a partial Fisher-Yates shuffle of ``0..pop-1``: for
``i = 0..k-1`` swap position ``i`` with ``i + below(pop - i)``; the first ``k``
positions, sorted, are the sample.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *keys: int) -> int:
    """Sub-seed for ``(seed, key1, key2, ...)``; used for per-trial streams."""
    state = seed & MASK64
    for key in keys:
        state = mix64(state ^ mix64((key * GOLDEN + GOLDEN) & MASK64))
    return state


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        if seed < 0 or seed > MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.state = seed

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def next_block(self, count: int) -> np.ndarray:
        """The next ``count`` outputs as a uint64 array (same values as repeated ``next_u64``)."""
        steps = np.arange(1, count + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + steps * np.uint64(GOLDEN)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
        self.state = (self.state + count * GOLDEN) & MASK64
        return z ^ (z >> np.uint64(31))

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)``."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        threshold = (1 << 64) % bound
        while True:
            x = self.next_u64()
            if x >= threshold:
                return x % bound

    def random(self) -> float:
        """Uniform float in ``[0, 1)`` with 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def sample(self, population: int, k: int) -> list[int]:
        """Sorted uniform ``k``-subset of ``range(population)``, O(k) work."""
        if not 0 <= k <= population:
            raise ValueError(f"cannot sample {k} of {population}")
        swapped: dict[int, int] = {}
        picked = []
        for i in range(k):
            j = i + self.below(population - i)
            vi = swapped.get(i, i)
            vj = swapped.get(j, j)
            swapped[j] = vi
            swapped[i] = vj
            picked.append(vj)
        picked.sort()
        return picked
