"""Consistency of coefficient tables with an Euler product.

Multiplicativity is checked through the canonical coprime split of each
index, n = p^v * m with p the smallest prime factor of n. Together with the
prime-power recursion this pins every a_n to the values at primes, and a
single corrupted coefficient shows up as exactly one violation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadReductionError, IndexRangeError
from .eta import CoefficientTable

MULTIPLICATIVITY_CAP = 10**6


@dataclass(frozen=True)
class Violation:
    indices: tuple[int, ...]
    expected: int
    actual: int

    def to_dict(self):
        return {"indices": list(self.indices), "expected": str(self.expected), "actual": str(self.actual)}


@dataclass
class ConsistencyReport:
    checked_pairs: int
    max_index: int
    violations: list[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def merge(self, other: "ConsistencyReport") -> "ConsistencyReport":
        return ConsistencyReport(
            self.checked_pairs + other.checked_pairs,
            max(self.max_index, other.max_index),
            self.violations + other.violations,
        )

    def to_dict(self):
        return {
            "checked_pairs": self.checked_pairs,
            "max_index": self.max_index,
            "passed": self.passed,
            "violations": [v.to_dict() for v in self.violations],
        }


def smallest_prime_factor(limit: int) -> np.ndarray:
    spf = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, int(limit**0.5) + 1):
        if spf[p] == p:
            block = spf[p * p :: p]
            mask = block == np.arange(p * p, limit + 1, p)
            block[mask] = p
    return spf


def check_multiplicativity(table: CoefficientTable, cap: int = MULTIPLICATIVITY_CAP) -> ConsistencyReport:
    """a_n == a_{p^v} * a_{n / p^v} for every index that is not a prime power."""
    a = table.values
    limit = min(table.n_max, cap)
    report = ConsistencyReport(checked_pairs=0, max_index=limit)
    if a[0] != 1:
        report.violations.append(Violation((1, 1), 1, a[0]))
    spf = smallest_prime_factor(limit)
    for n in range(6, limit + 1):
        p = int(spf[n])
        pv = p
        while n % (pv * p) == 0:
            pv *= p
        if pv == n:
            continue
        m = n // pv
        report.checked_pairs += 1
        expected = a[pv - 1] * a[m - 1]
        if a[n - 1] != expected:
            report.violations.append(Violation((pv, m), expected, a[n - 1]))
    return report


def check_hecke_recursion(table: CoefficientTable, p: int) -> ConsistencyReport:
    """a_{p^(r+1)} == a_p a_{p^r} - p^(k-1) a_{p^(r-1)} for all p^(r+1) <= n_max."""
    if p in table.bad_primes:
        raise BadReductionError(f"{p} is a bad prime; the recursion does not apply")
    if p * p > table.n_max:
        raise IndexRangeError(f"p^2 = {p * p} exceeds n_max = {table.n_max}")
    a = table.values
    scale = p ** (table.weight - 1)
    ap = a[p - 1]
    report = ConsistencyReport(checked_pairs=0, max_index=table.n_max)
    prev, cur = 1, ap  # a_{p^0}, a_{p^1}
    power = p
    while power * p <= table.n_max:
        nxt = power * p
        expected = ap * cur - scale * prev
        actual = a[nxt - 1]
        report.checked_pairs += 1
        if actual != expected:
            report.violations.append(Violation((p, nxt), expected, actual))
        prev, cur = cur, actual
        power = nxt
    return report


def check_all_recursions(table: CoefficientTable, primes) -> ConsistencyReport:
    report = ConsistencyReport(checked_pairs=0, max_index=table.n_max)
    for p in primes:
        p = int(p)
        if p * p > table.n_max:
            break
        if p in table.bad_primes:
            continue
        report = report.merge(check_hecke_recursion(table, p))
    return report


def bad_prime_summary(table: CoefficientTable) -> list[dict]:
    """Informational look at bad primes: |a_p| <= 1 (weight 2) and a_{p^r} == a_p^r."""
    out = []
    for p in sorted(table.bad_primes):
        if p > table.n_max:
            continue
        ap = table.values[p - 1]
        powers_ok = True
        power, expected = p * p, ap * ap
        while power <= table.n_max:
            if table.values[power - 1] != expected:
                powers_ok = False
            power *= p
            expected *= ap
        entry = {"prime": p, "a_p": ap, "powers_match": powers_ok}
        if table.weight == 2:
            entry["abs_le_1"] = abs(ap) <= 1
        out.append(entry)
    return out


def reconstruct_from_primes(prime_values: dict[int, int], weight: int, bad_primes, n_max: int) -> list[int]:
    """Rebuild a_1..a_n_max from a_p alone via the recursion and multiplicativity."""
    bad = set(bad_primes)
    a = [0] * (n_max + 1)
    a[1] = 1
    for p, ap in sorted(prime_values.items()):
        if p > n_max:
            continue
        scale = p ** (weight - 1)
        prev, cur = 1, ap
        a[p] = ap
        power = p
        while power * p <= n_max:
            nxt = ap * cur if p in bad else ap * cur - scale * prev
            prev, cur = cur, nxt
            power *= p
            a[power] = nxt
    spf = smallest_prime_factor(n_max)
    for n in range(6, n_max + 1):
        p = int(spf[n])
        pv = p
        while n % (pv * p) == 0:
            pv *= p
        if pv != n:
            a[n] = a[pv] * a[n // pv]
    return a[1:]
