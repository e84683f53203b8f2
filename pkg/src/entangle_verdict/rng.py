"""Portable deterministic random numbers.

Generator: xoshiro256** (Blackman & Vigna, 2018), state filled from the
seed with splitmix64. Both are specified by their published constants
below and use only 64-bit integer arithmetic, so streams are identical on
every platform and Python version.

Derived streams: the stream for task ``k`` under seed ``s`` is seeded with
``mix64(s) ^ k``, where ``mix64`` is the splitmix64 finalizer. Mixing first
keeps neighbouring seeds from sharing streams (``s ^ k`` alone would give
``(0, 1)`` and ``(1, 0)`` the same stream).

Floating-point samplers use IEEE arithmetic plus ``math.log``/``math.sqrt``
/``math.lgamma``; ``sqrt`` is correctly rounded everywhere, the others
agree across mainstream libms.
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """splitmix64 output finalizer (a bijection on 64-bit integers)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def splitmix64(state: int):
    """Infinite splitmix64 sequence starting from ``state``."""
    while True:
        state = (state + _GOLDEN) & MASK64
        yield mix64(state)


def derive_seed(seed: int, index: int) -> int:
    return mix64(seed) ^ (index & MASK64)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256:
    """xoshiro256** generator."""

    def __init__(self, seed: int):
        if seed < 0 or seed > MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        gen = splitmix64(seed)
        self.s = [next(gen) for _ in range(4)]

    def next_u64(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def normal(self) -> float:
        """Standard normal via the Marsaglia polar method (one value per call)."""
        while True:
            u = 2.0 * self.random() - 1.0
            v = 2.0 * self.random() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                return u * math.sqrt(-2.0 * math.log(s) / s)

    def poisson(self, lam: float) -> int:
        if lam < 0 or not math.isfinite(lam):
            raise ValueError(f"invalid Poisson mean {lam!r}")
        if lam == 0:
            return 0
        if lam < 10:
            return self._poisson_inversion(lam)
        return self._poisson_ptrs(lam)

    def _poisson_inversion(self, lam: float) -> int:
        limit = math.exp(-lam)
        k = 0
        prod = self.random()
        while prod > limit:
            k += 1
            prod *= self.random()
        return k

    def _poisson_ptrs(self, lam: float) -> int:
        # Hormann's transformed rejection with squeeze, valid for lam >= 10.
        slam = math.sqrt(lam)
        loglam = math.log(lam)
        b = 0.931 + 2.53 * slam
        a = -0.059 + 0.02483 * b
        invalpha = 1.1239 + 1.1328 / (b - 3.4)
        vr = 0.9277 - 3.6224 / (b - 2)
        while True:
            u = self.random() - 0.5
            v = self.random()
            us = 0.5 - abs(u)
            if us == 0.0:
                continue
            k = math.floor((2 * a / us + b) * u + lam + 0.43)
            if us >= 0.07 and v <= vr:
                return k
            if k < 0 or v == 0.0 or (us < 0.013 and v > us):
                continue
            if (math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)) <= (
                -lam + k * loglam - math.lgamma(k + 1)
            ):
                return k
