import functools

import pytest

from stspacing.angles import angle_series, unfolded_series
from stspacing.eta import eta_product
from stspacing.presets import PRESETS
from stspacing.primes import first_n_primes

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def full_run(name):
    """Primes, table, angles and unfolded values for a preset at its full size."""
    preset = PRESETS[name]
    primes = first_n_primes(preset.num_primes)
    table = eta_product(preset.eta, primes.limit)
    angles = angle_series(table, primes)
    return primes, table, angles, unfolded_series(angles)


@pytest.fixture(scope="session")
def preset_run():
    return full_run


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
