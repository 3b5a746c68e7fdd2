"""Deterministic, seedable random streams for reproducible experiments.

The generator stack is pinned exactly so that runs can be reproduced from a
seed alone, in this implementation or any other language:

* ``splitmix64``: state advances by the odd constant 0x9E3779B97F4A7C15; the
  output is the new state scrambled by two xor-shift-multiply rounds
  (0xBF58476D1CE4E5B9 after ``>> 30``, 0x94D049BB133111EB after ``>> 27``)
  and a final ``>> 31`` xor.  All arithmetic is modulo 2**64.
* ``xoshiro256**``: the four 64-bit state words are filled by four successive
  splitmix64 outputs.  Each draw returns ``rotl(s1 * 5, 7) * 9`` and updates
  the state with the standard xor/shift/rotate schedule (``t = s1 << 17``,
  ``s2 ^= s0``, ``s3 ^= s1``, ``s1 ^= s2``, ``s0 ^= s3``, ``s2 ^= t``,
  ``s3 = rotl(s3, 45)``).
* Uniform doubles take the top 53 bits: ``(next() >> 11) * 2**-53``.
* Standard normal pairs use the trigonometric Box-Muller transform on two
  such uniforms, resampling the first while it is exactly zero:
  ``r = sqrt(-2 ln u1)``, ``(r cos(2 pi u2), r sin(2 pi u2))``.

Per-run streams are derived as ``Xoshiro256StarStar(seed ^ run_index)``, so a
batch of runs is reproducible in any order and from any worker layout.  The
integer pipeline is bit-exact everywhere; the normal transform additionally
depends on the platform libm for log/cos/sin, which is deterministic on a
given machine.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state once; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def _rotl(v: int, k: int) -> int:
    return ((v << k) | (v >> (64 - k))) & _MASK64


class Xoshiro256StarStar:
    """xoshiro256** stream seeded through splitmix64."""

    __slots__ = ("_s0", "_s1", "_s2", "_s3")

    def __init__(self, seed: int):
        state = seed & _MASK64
        state, self._s0 = splitmix64(state)
        state, self._s1 = splitmix64(state)
        state, self._s2 = splitmix64(state)
        _, self._s3 = splitmix64(state)

    def next_u64(self) -> int:
        result = (_rotl((self._s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (self._s1 << 17) & _MASK64
        self._s2 ^= self._s0
        self._s3 ^= self._s1
        self._s1 ^= self._s2
        self._s0 ^= self._s3
        self._s2 ^= t
        self._s3 = _rotl(self._s3, 45)
        return result

    def uniform53(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits of one draw."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.uniform53()

    def normal_pair(self) -> tuple[float, float]:
        """One Box-Muller pair of independent standard normals."""
        u1 = self.uniform53()
        while u1 == 0.0:
            u1 = self.uniform53()
        u2 = self.uniform53()
        r = math.sqrt(-2.0 * math.log(u1))
        a = 2.0 * math.pi * u2
        return r * math.cos(a), r * math.sin(a)


def stream_for_run(seed: int, run_index: int) -> Xoshiro256StarStar:
    """Independent per-run stream: xoshiro seeded from seed XOR run_index."""
    return Xoshiro256StarStar((seed ^ run_index) & _MASK64)
