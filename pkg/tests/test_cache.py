import logging

import pytest

from stspacing.cache import cache_path, default_cache_dir, load_or_compute, read_table, write_table
from stspacing.errors import CacheFormatError
from stspacing.eta import CoefficientTable, eta_product
from stspacing.presets import PRESETS

SPEC_C = PRESETS["c"].eta


def test_roundtrip_extremes(tmp_path):
    values = (1, 0, -1, 127, 128, -128, -129, 2**200 + 3, -(2**93), 0)
    table = CoefficientTable(values, 12, frozenset({2, 5}), "odd")
    path = tmp_path / "t.coef"
    write_table(path, table)
    header, back = read_table(path)
    assert back == table
    assert back.values == values
    assert header["label"] == "odd" and header["bad_primes"] == "2,5"


def test_header_is_plain_text(tmp_path):
    path = tmp_path / "c.coef"
    write_table(path, eta_product(SPEC_C, 20), SPEC_C)
    head = path.read_bytes().split(b"\n\n", 1)[0].decode("ascii").splitlines()
    assert head[0] == "STSPACING-COEFFS 1"
    assert "n_max=20" in head and "weight=12" in head and "factors=1:24" in head


def test_roundtrip_delta(tmp_path):
    table = eta_product(SPEC_C, 5000)
    path = tmp_path / "d.coef"
    write_table(path, table, SPEC_C)
    assert read_table(path)[1] == table


def _broken(tmp_path, mutate):
    path = tmp_path / "x.coef"
    write_table(path, eta_product(SPEC_C, 30), SPEC_C)
    path.write_bytes(mutate(path.read_bytes()))
    return path


@pytest.mark.parametrize(
    "mutate",
    [
        lambda b: b.replace(b"STSPACING-COEFFS 1", b"STSPACING-COEFFS 9", 1),
        lambda b: b.replace(b"STSPACING-COEFFS", b"SOMETHING-ELSE!!", 1),
        lambda b: b[:-3],
        lambda b: b + b"\x00",
        lambda b: b.replace(b"\n\n", b"\n", 1),
    ],
    ids=["version", "magic", "truncated", "trailing", "no-terminator"],
)
def test_format_errors(tmp_path, mutate):
    with pytest.raises(CacheFormatError):
        read_table(_broken(tmp_path, mutate))


def test_hit_and_miss(tmp_path):
    first, hit1 = load_or_compute(SPEC_C, 200, tmp_path)
    second, hit2 = load_or_compute(SPEC_C, 200, tmp_path)
    assert (hit1, hit2) == (False, True)
    assert first == second
    assert cache_path(tmp_path, SPEC_C.label, 200).exists()


def test_no_cache_dir_computes():
    table, hit = load_or_compute(SPEC_C, 50, None)
    assert not hit and table[2] == -24


def test_corrupt_cache_is_rebuilt(tmp_path, caplog):
    load_or_compute(SPEC_C, 100, tmp_path)
    path = cache_path(tmp_path, SPEC_C.label, 100)
    path.write_bytes(path.read_bytes()[:-1])
    with caplog.at_level(logging.WARNING):
        table, hit = load_or_compute(SPEC_C, 100, tmp_path)
    assert not hit and table == eta_product(SPEC_C, 100)
    assert "unreadable" in caplog.text
    assert read_table(path)[1] == table


def test_mismatched_cache_is_rebuilt(tmp_path, caplog):
    # A file under the right name but holding a different product.
    path = cache_path(tmp_path, SPEC_C.label, 60)
    write_table(path, eta_product(PRESETS["a"].eta, 60), PRESETS["a"].eta)
    with caplog.at_level(logging.WARNING):
        table, hit = load_or_compute(SPEC_C, 60, tmp_path)
    assert not hit and table[2] == -24
    assert "does not match" in caplog.text


def test_cache_path_sanitizes():
    assert cache_path("/tmp", "a/b c", 7).name == "a-b-c.N7.coef"


def test_default_cache_dir(monkeypatch, tmp_path):
    monkeypatch.setenv("STSPACING_CACHE", str(tmp_path))
    assert default_cache_dir() == tmp_path
    monkeypatch.delenv("STSPACING_CACHE")
    assert default_cache_dir().name == "stspacing"
