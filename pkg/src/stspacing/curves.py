"""Point counting on Weierstrass curves over F_p and the resulting traces a_p."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import BadReductionError, InternalConsistencyError, InvalidSpecError


def prime_factors(n: int) -> set[int]:
    n = abs(n)
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.add(n)
    return out


@dataclass(frozen=True)
class CurveSpec:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over Q, with its conductor."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    conductor: int
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.conductor < 1:
            raise InvalidSpecError("conductor must be positive")
        if self.discriminant == 0:
            raise InvalidSpecError(f"singular Weierstrass model {self.coefficients}")
        extra = prime_factors(self.conductor) - self.bad_primes
        if extra:
            raise InvalidSpecError(
                f"conductor primes {sorted(extra)} do not divide the discriminant {self.discriminant}"
            )

    @property
    def coefficients(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b_invariants(self) -> tuple[int, int, int, int]:
        a1, a2, a3, a4, a6 = self.coefficients
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @cached_property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @cached_property
    def bad_primes(self) -> frozenset[int]:
        """Primes dividing the discriminant of this model."""
        return frozenset(prime_factors(self.discriminant))

    def has_good_reduction(self, p: int) -> bool:
        return self.discriminant % p != 0

    def equation(self) -> str:
        a1, a2, a3, a4, a6 = self.coefficients
        lhs = "y^2" + _terms([(a1, "xy"), (a3, "y")])
        rhs = "x^3" + _terms([(a2, "x^2"), (a4, "x"), (a6, "")])
        return f"{lhs} = {rhs}"


def _terms(pairs):
    out = ""
    for c, mono in pairs:
        if c == 0:
            continue
        sign = " + " if c > 0 else " - "
        mag = abs(c)
        coef = "" if (mag == 1 and mono) else str(mag)
        out += f"{sign}{coef}{mono}"
    return out


def _count_enumerate(curve: CurveSpec, p: int) -> int:
    a1, a2, a3, a4, a6 = (c % p for c in curve.coefficients)
    total = 1
    for x in range(p):
        rhs = (x * x * x + a2 * x * x + a4 * x + a6) % p
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - rhs) % p == 0:
                total += 1
    return total


def _character_table(p: int) -> np.ndarray:
    chi = np.full(p, -1, dtype=np.int64)
    sq = np.arange(p, dtype=np.int64)
    chi[(sq * sq) % p] = 1
    chi[0] = 0
    return chi


def _count_character_sum(curve: CurveSpec, p: int) -> int:
    # (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6, so each x contributes 1 + chi(rhs).
    b2, b4, b6, _ = curve.b_invariants
    c2, c1, c0 = b2 % p, (2 * b4) % p, b6 % p
    x = np.arange(p, dtype=np.int64)
    rhs = (4 * x + c2) % p
    rhs = (rhs * x + c1) % p
    rhs = (rhs * x + c0) % p
    return p + 1 + int(_character_table(p)[rhs].sum())


def count_points(curve: CurveSpec, p: int) -> int:
    """#E(F_p), including the point at infinity, for a prime of good reduction."""
    if not curve.has_good_reduction(p):
        raise BadReductionError(f"{curve.label or curve.coefficients} has bad reduction at {p}")
    if p <= 3:
        return _count_enumerate(curve, p)
    return _count_character_sum(curve, p)


def trace_ap(curve: CurveSpec, p: int) -> int:
    """a_p = p + 1 - #E(F_p); checked against the Hasse bound."""
    ap = p + 1 - count_points(curve, p)
    if ap * ap > 4 * p:
        raise InternalConsistencyError(f"Hasse bound violated: a_{p} = {ap}")
    return ap


def trace_table(curve: CurveSpec, primes) -> dict[int, int]:
    """a_p for every prime of good reduction in ``primes``; bad primes are skipped."""
    return {int(p): trace_ap(curve, int(p)) for p in primes if curve.has_good_reduction(int(p))}


def hasse_interval(p: int) -> tuple[float, float]:
    r = 2 * math.sqrt(p)
    return p + 1 - r, p + 1 + r
