"""Seeded integer PRNG used wherever byte-level reproducibility matters.

Generated artifacts (synthetic videos, random attack onsets) must be
bit-identical across platforms and library versions, so this module pins
the generator to an explicit integer recurrence instead of relying on
numpy's or the stdlib's RNG internals.

The generator is xorshift64*:

    state ^= state >> 12
    state ^= (state << 25) mod 2**64
    state ^= state >> 27
    output = (state * 0x2545F4914F6CDD1D) mod 2**64

The 64-bit seed is first passed through one round of splitmix64

    z = (seed + 0x9E3779B97F4A7C15) mod 2**64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    state = z ^ (z >> 31)

which decorrelates nearby seeds and guarantees a nonzero state (state 0
is a fixed point of xorshift; if the mix ever yields 0 the constant
0x9E3779B97F4A7C15 is used instead).
"""

_MASK64 = (1 << 64) - 1


def _splitmix64(seed: int) -> int:
    z = (seed + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class Xorshift64Star:
    """xorshift64* stream seeded via one splitmix64 round."""

    def __init__(self, seed: int):
        state = _splitmix64(seed & _MASK64)
        self._state = state if state != 0 else 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK64
        x ^= x >> 27
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK64

    def next_below(self, n: int) -> int:
        """Uniform-ish integer in [0, n). Modulo bias is < 2**-50 for the
        desk-scale ranges used here and keeps draws reproducible."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def unit(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)
