"""Deterministic generator: reference values, determinism, uniformity."""

import math
from itertools import permutations

from secondprice.rng import CoinStream, Rng, make_coins, make_permutation


def test_stream_is_deterministic():
    a = Rng(123456789)
    b = Rng(123456789)
    assert [a.next_u64() for _ in range(64)] == [b.next_u64() for _ in range(64)]


def test_different_seeds_differ():
    assert Rng(1).next_u64() != Rng(2).next_u64()


def test_below_range_and_determinism():
    rng = Rng(5)
    draws = [rng.below(7) for _ in range(2000)]
    assert all(0 <= d < 7 for d in draws)
    again = Rng(5)
    assert draws == [again.below(7) for _ in range(2000)]


def test_shuffle_is_permutation():
    rng = Rng(9)
    items = list(range(50))
    shuffled = items[:]
    rng.shuffle(shuffled)
    assert sorted(shuffled) == items


def test_make_permutation_identity_for_n1():
    assert make_permutation(42, 1) == [0]
    assert make_permutation(43, 0) == []


def test_make_permutation_repeatable():
    assert make_permutation(7, 10) == make_permutation(7, 10)


def test_permutation_uniformity_n4():
    """Each of the 24 orderings appears with frequency 1/24 within 3
    standard errors over 10^5 draws."""
    draws = 100_000
    counts = {p: 0 for p in permutations(range(4))}
    rng = Rng(20_26)
    for _ in range(draws):
        items = [0, 1, 2, 3]
        rng.shuffle(items)
        counts[tuple(items)] += 1
    p = 1 / 24
    band = 3 * math.sqrt(p * (1 - p) / draws)
    for perm, count in counts.items():
        assert abs(count / draws - p) <= band, (perm, count)


def test_coin_stream_counts_and_balance():
    coins = make_coins(77)
    flips = [coins.flip() for _ in range(10_000)]
    assert coins.used == 10_000
    assert set(flips) <= {0, 1}
    mean = sum(flips) / len(flips)
    assert abs(mean - 0.5) <= 3 * math.sqrt(0.25 / len(flips))


def test_coin_stream_deterministic():
    a, b = CoinStream(3), CoinStream(3)
    assert [a.flip() for _ in range(100)] == [b.flip() for _ in range(100)]


def test_sample_indices_distinct():
    rng = Rng(4)
    for _ in range(200):
        picks = rng.sample_indices(10, 4)
        assert len(set(picks)) == 4
        assert all(0 <= x < 10 for x in picks)
