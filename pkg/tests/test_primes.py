import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import is_prime_trial
from stspacing.errors import EmptyRangeError
from stspacing.primes import _segmented_sieve, first_n_primes, is_prime, primes_below, sieve


def test_small_sieve():
    assert sieve(10).tolist() == [2, 3, 5, 7]
    assert sieve(2).tolist() == [2]


@pytest.mark.parametrize("limit, count", [(17389, 2000), (104729, 10000)])
def test_sieve_counts(limit, count):
    # 17389 and 104729 are the 2000th and 10000th primes (trial division).
    table = sieve(limit)
    assert table.count == count
    assert table[-1] == limit


def test_first_n_primes():
    assert first_n_primes(4).tolist() == [2, 3, 5, 7]
    assert first_n_primes(1).tolist() == [2]
    assert first_n_primes(2000).limit == 17389


def test_empty_ranges():
    with pytest.raises(EmptyRangeError):
        sieve(1)
    with pytest.raises(EmptyRangeError):
        first_n_primes(0)


def test_table_invariants_against_trial_division():
    table = sieve(5000)
    primes = table.tolist()
    assert all(a < b for a, b in zip(primes, primes[1:]))
    assert primes == [n for n in range(5001) if is_prime_trial(n)]


def test_segmented_matches_plain():
    assert np.array_equal(_segmented_sieve(200_003, segment_size=997), sieve(200_003).primes)
    assert sieve(150_000, segment_threshold=1000) == sieve(150_000)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=3000))
def test_first_n_is_prefix_of_sieve(n):
    head = first_n_primes(n)
    assert len(head) == n
    assert head.tolist() == sieve(head.limit).tolist()[:n]


def test_deterministic():
    assert first_n_primes(500) == first_n_primes(500)


def test_table_is_read_only():
    table = sieve(100)
    with pytest.raises(ValueError):
        table.primes[0] = 4


def test_miller_rabin_matches_trial_division():
    assert [n for n in range(3000) if is_prime(n)] == [n for n in range(3000) if is_prime_trial(n)]
    assert is_prime(2**61 - 1)
    assert not is_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7


def test_primes_below():
    assert primes_below(30, 3) == [29, 23, 19]
