"""Prime tables: everything up to a limit, or the first n primes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyRangeError

SEGMENT_THRESHOLD = 10**7
SEGMENT_SIZE = 1 << 22


@dataclass(frozen=True, eq=False)
class PrimeTable:
    primes: np.ndarray
    limit: int

    def __post_init__(self):
        self.primes.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, PrimeTable):
            return NotImplemented
        return self.limit == other.limit and np.array_equal(self.primes, other.primes)

    def __len__(self):
        return len(self.primes)

    def __iter__(self):
        return (int(p) for p in self.primes)

    def __getitem__(self, i):
        return self.primes[i]

    @property
    def count(self) -> int:
        return len(self.primes)

    def tolist(self) -> list[int]:
        return [int(p) for p in self.primes]


def _plain_sieve(limit: int) -> np.ndarray:
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    is_prime[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if is_prime[p]:
            is_prime[p * p :: 2 * p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _segmented_sieve(limit: int, segment_size: int = SEGMENT_SIZE) -> np.ndarray:
    base = _plain_sieve(math.isqrt(limit))
    chunks = [base]
    low = base[-1] + 1 if len(base) else 2
    odd_base = base[base > 2]
    while low <= limit:
        high = min(low + segment_size, limit + 1)  # exclusive
        mask = np.ones(high - low, dtype=bool)
        first_even = low + (low & 1)
        mask[first_even - low :: 2] = False
        for p in odd_base:
            p = int(p)
            if p * p >= high:
                break
            start = max(p * p, -(-low // p) * p)
            mask[start - low :: p] = False
        chunks.append(np.flatnonzero(mask).astype(np.int64) + low)
        low = high
    return np.concatenate(chunks)


def sieve(limit: int, *, segment_threshold: int = SEGMENT_THRESHOLD) -> PrimeTable:
    """All primes p <= limit, increasing.

    Limits above ``segment_threshold`` are sieved in fixed-size segments so
    memory stays bounded by the segment size plus the output.
    """
    if limit < 2:
        raise EmptyRangeError(f"no primes up to {limit}")
    if limit > segment_threshold:
        primes = _segmented_sieve(limit)
    else:
        primes = _plain_sieve(limit)
    return PrimeTable(primes, int(limit))


def nth_prime_upper_bound(n: int) -> int:
    # Rosser's bound p_n < n (ln n + ln ln n) holds for n >= 6.
    if n < 6:
        return 13
    ln = math.log(n)
    return int(n * (ln + math.log(ln))) + 1


def first_n_primes(n: int) -> PrimeTable:
    """The first n primes; ``limit`` is the n-th prime."""
    if n < 1:
        raise EmptyRangeError("need at least one prime")
    table = sieve(nth_prime_upper_bound(n))
    primes = table.primes[:n].copy()
    return PrimeTable(primes, int(primes[-1]))


def primes_for(num_primes: int | None = None, prime_limit: int | None = None) -> PrimeTable:
    """Resolve the two ways a run can size its prime sample."""
    if (num_primes is None) == (prime_limit is None):
        raise ValueError("exactly one of num_primes / prime_limit must be given")
    if num_primes is not None:
        return first_n_primes(num_primes)
    return sieve(prime_limit)


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; the fixed bases are exact below 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_below(bound: int, count: int) -> list[int]:
    """The ``count`` largest primes strictly below ``bound``, descending."""
    out = []
    n = bound - 1
    while len(out) < count:
        if n < 2:
            raise EmptyRangeError(f"fewer than {count} primes below {bound}")
        if is_prime(n):
            out.append(n)
        n -= 1
    return out
