"""Deterministic 64-bit PRNG for instance generation.

xorshift64* with the shift triple (12, 25, 27) and multiplier
0x2545F4914F6CDD1D. The algorithm is spelled out so that a port in any
language reproduces bit-identical instance streams; none of the generators
use the host language's RNG. Seed 0 (the fixed point of xorshift) is
remapped to 0x9E3779B97F4A7C15.
"""

from __future__ import annotations

from fractions import Fraction

_MASK = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D
_SEED0 = 0x9E3779B97F4A7C15


class XorShift64Star:
    def __init__(self, seed: int):
        self.state = seed & _MASK or _SEED0

    def next64(self) -> int:
        x = self.state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK
        x ^= x >> 27
        self.state = x
        return (x * _MULT) & _MASK

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound), by rejection to avoid modulo bias."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (_MASK + 1) - (_MASK + 1) % bound
        while True:
            r = self.next64()
            if r < limit:
                return r % bound

    def chance(self, p: Fraction) -> bool:
        """True with exact probability p."""
        return self.below(p.denominator) < p.numerator

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def distinct(self, bound: int, k: int) -> list[int]:
        """k distinct integers from [0, bound), in drawing order."""
        if k > bound:
            raise ValueError("cannot draw more distinct values than the range holds")
        seen: set[int] = set()
        out: list[int] = []
        while len(out) < k:
            r = self.below(bound)
            if r not in seen:
                seen.add(r)
                out.append(r)
        return out
