"""SplitMix64 pseudo-random stream.

Every randomized routine in the package draws from this generator so that
results depend only on the integer seed, never on numpy or platform RNGs.
"""

from __future__ import annotations

import numpy as np

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Sequential SplitMix64: state advances by GOLDEN_GAMMA, output is mixed state."""

    __slots__ = ("state",)

    def __init__(self, seed: int = 0):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & _MASK
        return _mix(self.state)

    def below(self, bound: int) -> int:
        # modulo reduction; bias is < bound / 2**64
        if bound <= 0:
            raise ValueError("bound must be positive")
        return self.next_u64() % bound

    def sign(self) -> int:
        return 1 if self.next_u64() >> 63 else -1

    def signs(self, n: int) -> np.ndarray:
        """n signs; identical to n successive sign() calls."""
        out = splitmix64_block(self.state, n)
        self.state = (self.state + n * GOLDEN_GAMMA) & _MASK
        return np.where(out >> np.uint64(63), 1, -1).astype(np.int8)

    def bits(self, n: int) -> np.ndarray:
        """n fair bits as a bool array; identical to n successive top-bit draws."""
        return self.signs(n) > 0

    def sample(self, population: int, k: int) -> list[int]:
        """k distinct indices from range(population), partial Fisher-Yates."""
        if not 0 <= k <= population:
            raise ValueError("sample size out of range")
        pool = list(range(population))
        for i in range(k):
            j = i + self.below(population - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]


def splitmix64_block(state: int, n: int) -> np.ndarray:
    """Outputs n successive draws starting after `state`, vectorized."""
    steps = np.arange(1, n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(state & _MASK) + steps * np.uint64(GOLDEN_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return z
