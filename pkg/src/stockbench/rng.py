"""SplitMix64 generator and per-cell seed derivation.

The generator is tiny and fully specified, so a benchmark cell produces the
same stream on any platform and regardless of which worker runs it.
"""
import hashlib

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """64-bit SplitMix generator (Steele, Lea & Flood 2014)."""

    def __init__(self, seed):
        self.state = int(seed) & _MASK

    def next_u64(self):
        self.state = (self.state + _GOLDEN) & _MASK
        return _mix(self.state)

    def random(self):
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, low, high, size):
        out = np.empty(size, dtype=np.float64)
        flat = out.reshape(-1)
        for i in range(flat.size):
            flat[i] = low + (high - low) * self.random()
        return out

    def below(self, n):
        """Unbiased integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = _MASK - (_MASK % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def permutation(self, n):
        """Fisher-Yates shuffle of ``range(n)``."""
        perm = np.arange(n)
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm


def derive_seed(global_seed, *labels):
    """Mix string labels (ticker, model variant, ...) into ``global_seed``.

    Labels are hashed with SHA-256 rather than ``hash()``, which is salted
    per process.
    """
    state = int(global_seed) & _MASK
    for label in labels:
        digest = hashlib.sha256(str(label).encode("utf-8")).digest()
        h = int.from_bytes(digest[:8], "little")
        state = _mix(((state ^ h) + _GOLDEN) & _MASK)
    return state
