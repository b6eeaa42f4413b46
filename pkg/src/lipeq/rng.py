"""SplitMix64: a portable 64-bit generator with a fully specified stream.

State update and output mix follow the reference algorithm::

    state = state + 0x9E3779B97F4A7C15          (mod 2**64)
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9    (mod 2**64)
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB    (mod 2**64)
    z = z ^ (z >> 31)

Doubles take the top 53 bits.  The initial state is the seed passed once
through the output mix, so nearby seeds start far apart.
"""
from __future__ import annotations

import math

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = _mix(int(seed) & _MASK)

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        return _mix(self.state)

    def random(self) -> float:
        """Uniform double in ``[0, 1)``."""
        return (self.next_u64() >> 11) * 2.0**-53

    def random_open(self) -> float:
        """Uniform double in ``(0, 1)``."""
        return ((self.next_u64() >> 11) + 0.5) * 2.0**-53

    def exponential(self) -> float:
        return -math.log(1.0 - self.random())

    def simplex(self, n: int) -> list[float]:
        """Uniform point of the n-simplex by normalizing exponential draws."""
        w = [self.exponential() for _ in range(n)]
        total = math.fsum(w)
        if total == 0.0:
            return [1.0 / n] * n
        return [v / total for v in w]
