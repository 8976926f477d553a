"""Exact q-expansions of eta products.

An eta product ``prod_i eta(q^m_i)^e_i`` is expanded from the sparse
pentagonal series of ``prod_n (1 - q^n)``: each factor is applied as ``e``
sparse-by-dense multiplications. The arithmetic runs on vectorized int64
arrays modulo several word-size primes and is reassembled by CRT. One extra
modulus is kept back as a check; a disagreement means some coefficient did
not fit the modular range, and the expansion is retried wider, eventually
falling back to Python integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .curves import prime_factors
from .errors import (
    BoundViolationError,
    IndexRangeError,
    InvalidSpecError,
    WidthExceededError,
)
from .primes import primes_below

MAX_RESIDUE_MODULI = 24


def pentagonal_terms(order: int) -> list[tuple[int, int]]:
    """(exponent, sign) pairs of prod_{n>=1} (1 - q^n) up to q^order, by exponent."""
    if order < 0:
        return []
    terms = [(0, 1)]
    k = 1
    while True:
        sign = -1 if k % 2 else 1
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 > order:
            break
        terms.append((g1, sign))
        if g2 <= order:
            terms.append((g2, sign))
        k += 1
    return terms


def euler_series(n_max: int) -> dict[int, int]:
    """Nonzero coefficients of prod_{n>=1} (1 - q^n) through q^n_max."""
    if n_max < 1:
        raise IndexRangeError("n_max must be positive")
    return dict(pentagonal_terms(n_max))


@dataclass(frozen=True)
class EtaProductSpec:
    factors: tuple[tuple[int, int], ...]
    label: str = ""
    bad_primes: frozenset[int] | None = None

    def __post_init__(self):
        factors = tuple((int(m), int(e)) for m, e in self.factors)
        if not factors:
            raise InvalidSpecError("an eta product needs at least one factor")
        for m, e in factors:
            if m < 1 or e < 1:
                raise InvalidSpecError(f"factor ({m}, {e}) must have positive dilation and exponent")
        if sum(m * e for m, e in factors) % 24:
            raise InvalidSpecError(
                f"sum of dilation*exponent is {sum(m * e for m, e in factors)}, not a multiple of 24"
            )
        total = sum(e for _, e in factors)
        if total % 4:
            raise InvalidSpecError(f"weight {total}/2 is not an even integer")
        object.__setattr__(self, "factors", factors)
        if self.bad_primes is None:
            level = reduce(math.lcm, (m for m, _ in factors))
            object.__setattr__(self, "bad_primes", frozenset(prime_factors(level)))
        else:
            object.__setattr__(self, "bad_primes", frozenset(int(p) for p in self.bad_primes))
        if not self.label:
            object.__setattr__(self, "label", "eta_" + "_".join(f"{m}^{e}" for m, e in factors))

    @property
    def weight(self) -> int:
        return sum(e for _, e in self.factors) // 2

    @property
    def leading_power(self) -> int:
        return sum(m * e for m, e in self.factors) // 24

    def describe(self) -> str:
        return " ".join(
            ("eta(q)" if m == 1 else f"eta(q^{m})") + (f"^{e}" if e > 1 else "") for m, e in self.factors
        )


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """a_1 .. a_n_max of a normalized cusp form, as exact integers."""

    values: tuple[int, ...]
    weight: int
    bad_primes: frozenset[int] = field(default_factory=frozenset)
    label: str = ""

    @property
    def n_max(self) -> int:
        return len(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n: int) -> int:
        return coefficient(self, n)

    def __eq__(self, other):
        if not isinstance(other, CoefficientTable):
            return NotImplemented
        return (
            self.values == other.values
            and self.weight == other.weight
            and self.bad_primes == other.bad_primes
        )

    def as_dict(self) -> dict[int, int]:
        return {n: a for n, a in enumerate(self.values, start=1)}

    def with_value(self, n: int, value: int) -> "CoefficientTable":
        """Copy with a_n replaced; used for fault injection."""
        vals = list(self.values)
        vals[n - 1] = value
        return CoefficientTable(tuple(vals), self.weight, self.bad_primes, self.label)


def coefficient(table: CoefficientTable, n: int) -> int:
    if not 1 <= n <= table.n_max:
        raise IndexRangeError(f"index {n} outside 1..{table.n_max}")
    return table.values[n - 1]


def within_deligne_bound(a: int, p: int, weight: int) -> bool:
    return a * a <= 4 * p ** (weight - 1)


def check_deligne_bound(table: CoefficientTable, primes: Sequence[int]) -> list[int]:
    """Primes at which a_p^2 > 4 p^(weight-1); exact integer comparison."""
    return [int(p) for p in primes if not within_deligne_bound(table.values[int(p) - 1], int(p), table.weight)]


def _factor_terms(factors, order):
    base = pentagonal_terms(order)
    for m, e in factors:
        terms = [(g * m, s) for g, s in base if g * m <= order]
        for _ in range(e):
            yield terms


def _expand_exact(factors, order: int) -> list[int]:
    cur = np.zeros(order + 1, dtype=object)
    cur[0] = 1
    for terms in _factor_terms(factors, order):
        new = np.zeros(order + 1, dtype=object)
        for g, s in terms:
            if s > 0:
                new[g:] += cur[: order + 1 - g]
            else:
                new[g:] -= cur[: order + 1 - g]
        cur = new
    return [int(c) for c in cur]


def _residue_bits(order: int) -> int:
    # Each sparse pass sums at most len(terms) residues; the sum must stay in int64.
    n_terms = len(pentagonal_terms(order))
    return min(50, 62 - n_terms.bit_length())


def _expand_residues(factors, order: int, moduli: Sequence[int]) -> np.ndarray:
    mods = np.array(moduli, dtype=np.int64)[:, None]
    cur = np.zeros((len(moduli), order + 1), dtype=np.int64)
    cur[:, 0] = 1
    for terms in _factor_terms(factors, order):
        new = np.zeros_like(cur)
        for g, s in terms:
            dst = new[:, g:]
            src = cur[:, : order + 1 - g]
            if s > 0:
                np.add(dst, src, out=dst)
            else:
                np.subtract(dst, src, out=dst)
        np.remainder(new, mods, out=new)
        cur = new
    return cur


def _crt_symmetric(residues: np.ndarray, moduli: Sequence[int]) -> np.ndarray:
    modulus = math.prod(moduli)
    acc = np.zeros(residues.shape[1], dtype=object)
    for row, m in zip(residues, moduli):
        partial = modulus // m
        weight = partial * pow(partial % m, -1, m)
        acc = acc + row.astype(object) * weight
    acc = acc % modulus
    half = modulus // 2
    return np.where(acc > half, acc - modulus, acc)


def expand_with_residues(factors, order: int, n_moduli: int, bits: int | None = None) -> list[int]:
    """Residue-arithmetic expansion with one redundant check modulus.

    Raises WidthExceededError when the check modulus disagrees with the CRT
    reconstruction, i.e. when ``n_moduli`` moduli cannot hold the result.
    """
    if bits is None:
        bits = _residue_bits(order)
    moduli = primes_below(1 << bits, n_moduli + 1)
    residues = _expand_residues(factors, order, moduli)
    values = _crt_symmetric(residues[:-1], moduli[:-1])
    check = moduli[-1]
    if not np.array_equal((values % check).astype(np.int64), residues[-1]):
        raise WidthExceededError(f"{n_moduli} moduli of {bits} bits are too narrow at order {order}")
    return [int(v) for v in values]


def _estimated_bits(weight: int, n_max: int) -> int:
    # |a_n| <= d(n) n^((k-1)/2) for eigenforms; d(n) < n^(1/2) is a loose cap.
    log_n = math.log2(max(n_max, 2))
    return int((weight - 1) / 2 * log_n + log_n / 2) + 16


def product_series(factors, order: int, *, method: str = "auto") -> list[int]:
    """Coefficients of prod_i prod_n (1 - q^(m_i n))^e_i through q^order.

    ``method`` is ``"residue"`` (fixed width, raises WidthExceededError),
    ``"exact"`` (Python integers) or ``"auto"`` (residue, widened and then
    promoted to exact integers on overflow).
    """
    if order < 0:
        return []
    if method == "exact":
        return _expand_exact(factors, order)
    weight = sum(e for _, e in factors) / 2
    bits = _residue_bits(order)
    n_moduli = max(1, -(-_estimated_bits(weight, order + 1) // (bits - 1)))
    if method == "residue":
        return expand_with_residues(factors, order, n_moduli, bits)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    while n_moduli <= MAX_RESIDUE_MODULI:
        try:
            return expand_with_residues(factors, order, n_moduli, bits)
        except WidthExceededError:
            n_moduli *= 2
    return _expand_exact(factors, order)


def eta_product(spec: EtaProductSpec, n_max: int, *, method: str = "auto") -> CoefficientTable:
    """Coefficient table of f(q) = sum a_n q^n = prod_i eta(q^m_i)^e_i, n = 1..n_max."""
    if n_max < 1:
        raise IndexRangeError("n_max must be positive")
    shift = spec.leading_power
    body = product_series(spec.factors, n_max - shift, method=method)
    # a_n is the coefficient of q^(n - shift) in the product.
    values = [0] * n_max
    for i, c in enumerate(body):
        values[i + shift - 1] = c
    return CoefficientTable(tuple(values), spec.weight, spec.bad_primes, spec.label)


def assert_deligne(table: CoefficientTable, primes: Sequence[int]) -> None:
    bad = check_deligne_bound(table, primes)
    if bad:
        p = bad[0]
        raise BoundViolationError(f"a_{p} = {table.values[p - 1]} exceeds 2 p^({table.weight}-1)/2")
