import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import stspacing.eta as eta_mod
from oracles import euler_product_direct, eta_product_naive, sigma
from stspacing.errors import IndexRangeError, InvalidSpecError, WidthExceededError
from stspacing.eta import (
    EtaProductSpec,
    check_deligne_bound,
    coefficient,
    eta_product,
    euler_series,
    expand_with_residues,
    product_series,
)
from stspacing.hecke import check_multiplicativity
from stspacing.presets import PRESETS
from stspacing.primes import sieve

SPEC_A, SPEC_B, SPEC_C = (PRESETS[k].eta for k in "abc")

# Delta to q^10 from repeated naive multiplication of the factors (1 - q^n).
DELTA_HEAD = [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]


def test_euler_series_examples():
    assert euler_series(7) == {0: 1, 1: -1, 2: -1, 5: 1, 7: 1}
    assert euler_series(7).get(3, 0) == 0
    assert euler_series(12)[12] == -1


def test_euler_series_matches_direct_product():
    order = 300
    direct = euler_product_direct(order)
    series = euler_series(order)
    assert [series.get(i, 0) for i in range(order + 1)] == direct


@pytest.mark.parametrize("n_max", [1, 10, 1000, 123_456])
def test_pentagonal_sparsity(n_max):
    series = euler_series(n_max)
    assert len(series) <= 2 * math.sqrt(2 * n_max / 3) + 2
    assert set(series.values()) <= {-1, 1}


def test_spec_metadata():
    assert (SPEC_A.weight, SPEC_B.weight, SPEC_C.weight) == (2, 2, 12)
    assert SPEC_A.leading_power == SPEC_B.leading_power == SPEC_C.leading_power == 1
    assert EtaProductSpec(((2, 2), (10, 2))).bad_primes == {2, 5}
    assert EtaProductSpec(((1, 24),)).bad_primes == frozenset()


@pytest.mark.parametrize(
    "factors",
    [((1, 12),), ((1, 1), (2, 1)), ((1, 3), (7, 3)), ((1, 2), (2, 11)), ((0, 24),), ()],
)
def test_invalid_specs(factors):
    with pytest.raises(InvalidSpecError):
        EtaProductSpec(factors)


def test_delta_head():
    assert list(eta_product(SPEC_C, 10).values) == DELTA_HEAD


def test_curve_a_head():
    table = eta_product(SPEC_A, 11)
    assert list(table.values[:3]) == [1, -2, -1]
    assert coefficient(table, 5) == 1
    assert coefficient(table, 11) == 1


def test_coefficient_range():
    table = eta_product(SPEC_C, 10)
    assert coefficient(table, 1) == 1
    assert coefficient(table, 2) == -24
    with pytest.raises(IndexRangeError):
        coefficient(table, 0)
    with pytest.raises(IndexRangeError):
        coefficient(table, 11)
    with pytest.raises(IndexRangeError):
        eta_product(SPEC_C, 0)


@pytest.mark.parametrize("spec", [SPEC_A, SPEC_B, SPEC_C], ids=["a", "b", "c"])
@pytest.mark.parametrize("method", ["auto", "residue", "exact"])
def test_matches_naive_oracle(spec, method):
    expected = eta_product_naive(spec.factors, 250)
    assert list(eta_product(spec, 250, method=method).values) == expected


def test_ramanujan_congruence():
    table = eta_product(SPEC_C, 100)
    for n in range(1, 101):
        assert (table[n] - sigma(11, n)) % 691 == 0, n


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(1, 8))
def test_dilation_identity(m, e):
    order = 240
    dilated = product_series(((m, e),), order)
    base = product_series(((1, e),), order // m)
    for i, c in enumerate(dilated):
        assert c == (base[i // m] if i % m == 0 else 0)


def test_residue_overflow_is_detected():
    with pytest.raises(WidthExceededError):
        expand_with_residues(((1, 24),), 200, n_moduli=1, bits=20)


def test_auto_widens_when_estimate_is_low(monkeypatch):
    monkeypatch.setattr(eta_mod, "_estimated_bits", lambda weight, n: 8)
    assert eta_product(SPEC_C, 200).values == tuple(eta_product_naive(SPEC_C.factors, 200))


def test_auto_promotes_to_exact(monkeypatch):
    monkeypatch.setattr(eta_mod, "_estimated_bits", lambda weight, n: 8)
    monkeypatch.setattr(eta_mod, "MAX_RESIDUE_MODULI", 0)
    assert eta_product(SPEC_C, 120).values == tuple(eta_product_naive(SPEC_C.factors, 120))


@pytest.mark.parametrize("spec", [SPEC_A, SPEC_B, SPEC_C], ids=["a", "b", "c"])
def test_table_invariants(spec):
    table = eta_product(spec, 3000)
    assert table[1] == 1
    assert check_deligne_bound(table, sieve(3000)) == []
    assert check_multiplicativity(table).passed


def test_weight_four_form():
    # eta(q)^4 eta(q^5)^4 spans S_4(Gamma_0(5)); a_2 = -4 and the bound uses p^3.
    spec = EtaProductSpec(((1, 4), (5, 4)))
    table = eta_product(spec, 500)
    assert table.weight == 4
    assert table[2] == -4
    assert check_deligne_bound(table, sieve(500)) == []
    assert table.values == tuple(eta_product_naive(spec.factors, 500))
