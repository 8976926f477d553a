"""The three worked examples: two weight-2 newforms and the discriminant."""

from __future__ import annotations

from dataclasses import dataclass

from .curves import CurveSpec
from .eta import EtaProductSpec


@dataclass(frozen=True)
class Preset:
    name: str
    eta: EtaProductSpec
    curve: CurveSpec | None
    num_primes: int
    description: str


PRESETS = {
    "a": Preset(
        "a",
        EtaProductSpec(((1, 2), (11, 2)), bad_primes=frozenset({11})),
        CurveSpec(0, -1, 1, 0, 0, conductor=11, label="11a"),
        2000,
        "eta(q)^2 eta(q^11)^2, E: y^2 + y = x^3 - x^2, N = 11",
    ),
    "b": Preset(
        "b",
        EtaProductSpec(((2, 2), (10, 2)), bad_primes=frozenset({2, 5})),
        CurveSpec(0, 1, 0, -1, 0, conductor=20, label="20a"),
        2000,
        "eta(q^2)^2 eta(q^10)^2, E: y^2 = x^3 + x^2 - x, bad primes 2, 5",
    ),
    "c": Preset(
        "c",
        EtaProductSpec(((1, 24),), bad_primes=frozenset()),
        None,
        10000,
        "eta(q)^24, the modular discriminant (weight 12)",
    ),
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
