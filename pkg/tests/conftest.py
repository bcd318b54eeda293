from functools import lru_cache

import pytest

from omegacensus import sieve_census
from omegacensus.partitions import all_primes, mod3_partition, mod4_partition, threshold_partition

SPECS = {
    "all": all_primes,
    "mod4": mod4_partition,
    "mod3": mod3_partition,
    "threshold100": lambda: threshold_partition(100),
}

# filled by tests/test_acceptance.py, printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


@lru_cache(maxsize=None)
def cached_census(name: str, x: int):
    return sieve_census(SPECS[name](), x)


@pytest.fixture
def mod4():
    return mod4_partition()


@pytest.fixture
def allp():
    return all_primes()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
