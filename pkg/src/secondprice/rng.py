"""Deterministic pseudorandom generator for reproducible experiments.

The generator is xoshiro256** seeded through splitmix64, implemented in
plain integer arithmetic so the stream is identical on every platform and
Python version.  Seeding: splitmix64 is stepped four times from the user
seed to fill the 256-bit state.  Output: the standard xoshiro256**
scrambler (rotl(s1 * 5, 7) * 9).

Integer draws below a bound use rejection sampling, so they are exactly
uniform; shuffles are backward Fisher-Yates.  Coin flips take the top bit
of the next 64-bit word.
"""

from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    z ^= z >> 31
    return state, z


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Rng:
    """xoshiro256** stream; same seed gives the same draws everywhere."""

    __slots__ = ("_s0", "_s1", "_s2", "_s3")

    def __init__(self, seed: int):
        state = seed & MASK64
        words = []
        for _ in range(4):
            state, w = _splitmix64(state)
            words.append(w)
        if not any(words):
            words[0] = 1  # all-zero state is a fixed point; unreachable in practice
        self._s0, self._s1, self._s2, self._s3 = words

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return result

    def below(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased via rejection sampling."""
        if n <= 0:
            raise ValueError("bound must be positive")
        if n == 1:
            return 0
        limit = (MASK64 + 1) - ((MASK64 + 1) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def coin(self) -> int:
        """Fair bit (top bit of the next word)."""
        return self.next_u64() >> 63

    def chance(self, p: float) -> bool:
        """Bernoulli(p) from a 53-bit uniform; used only for instance sampling."""
        return (self.next_u64() >> 11) * (2.0**-53) < p

    def shuffle(self, items: list) -> None:
        """In-place backward Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n), in draw order."""
        if k > n:
            raise ValueError("sample size exceeds population")
        pool = list(range(n))
        picked = []
        for i in range(k):
            j = self.below(n - i)
            picked.append(pool[j])
            pool[j] = pool[n - 1 - i]
        return picked


class CoinStream:
    """Replayable fair-coin sequence; counts how many bits were consumed."""

    __slots__ = ("_rng", "used")

    def __init__(self, seed: int):
        self._rng = Rng(seed)
        self.used = 0

    def flip(self) -> int:
        self.used += 1
        return self._rng.coin()


def make_permutation(seed: int, n: int) -> list[int]:
    """Uniform permutation of range(n) drawn from the seeded stream."""
    perm = list(range(n))
    Rng(seed).shuffle(perm)
    return perm


def make_coins(seed: int) -> CoinStream:
    return CoinStream(seed)
