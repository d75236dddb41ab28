"""SplitMix64 random stream and seed derivation.

All randomness in the package flows through :class:`Rng`; there is no global
state, so a seed fully determines every sample.
"""
from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """SplitMix64 output finalizer (a bijection on uint64)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    # uint64 arithmetic wraps mod 2**64, matching mix64.
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= np.uint64(_M1)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_M2)
    z ^= z >> np.uint64(31)
    return z


def derive_seed(master: int, index: int) -> int:
    """Per-sample seed: ``mix64(master XOR index * GAMMA)``."""
    return mix64((master & MASK64) ^ ((index * GAMMA) & MASK64))


def derive_seeds(master: int, indices) -> np.ndarray:
    """Vectorized :func:`derive_seed` over an array of indices."""
    idx = np.asarray(indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix64_array(np.uint64(master & MASK64) ^ (idx * np.uint64(GAMMA)))


class Rng:
    """SplitMix64 generator.

    ``next()`` advances the state by the golden-ratio increment and returns
    the finalized state. Floats use the high 53 bits.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def __repr__(self):
        return f"Rng(state={self.state:#018x})"

    def next(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def uniform(self) -> float:
        """Float in [0, 1)."""
        return (self.next() >> 11) * _INV53

    def uniform_range(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.uniform()

    def below(self, n: int) -> int:
        """Integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return min(int(self.uniform() * n), n - 1)

    def randint(self, lo: int, hi: int) -> int:
        """Integer in [lo, hi], both inclusive."""
        return lo + self.below(hi - lo + 1)

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def chance(self, p: float) -> bool:
        return self.uniform() < p

    def spawn(self) -> "Rng":
        """Independent child stream seeded from this one."""
        return Rng(self.next())

    def next_array(self, n: int) -> np.ndarray:
        """The next ``n`` outputs as uint64, identical to ``n`` calls of :meth:`next`."""
        steps = np.arange(1, n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            states = np.uint64(self.state) + steps * np.uint64(GAMMA)
        self.state = (self.state + n * GAMMA) & MASK64
        return _mix64_array(states)

    def uniform_array(self, n: int) -> np.ndarray:
        return (self.next_array(n) >> np.uint64(11)).astype(np.float64) * _INV53
