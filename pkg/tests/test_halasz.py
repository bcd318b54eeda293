import cmath
import json
import math

import numpy as np
import pytest

from omegacensus import DomainError, naive_census
from omegacensus.halasz import (
    GAMMA0_COEFF,
    FunctionOnPrimes,
    angle_gaps,
    distance,
    halasz_bound_rhs,
    mean_value_ratio,
    min_distance,
)
from omegacensus.partitions import all_primes, mod4_partition, reciprocal_sums
from omegacensus.sieve import primes_up_to

from conftest import cached_census

ONE = FunctionOnPrimes.constant(1, 1)
MINUS = FunctionOnPrimes.constant(-1, 1)


def brute_distance(x, z, tau):
    return math.fsum((1 - (z * p ** complex(0, -tau)).real) / p for p in primes_up_to(x).tolist())


def test_distance_of_one_at_zero_is_zero():
    assert distance(all_primes(), 10**5, ONE, 0.0) == 0.0


def test_distance_minus_one_x10():
    assert distance(all_primes(), 10, MINUS, 0.0) == pytest.approx(2 * (1 / 2 + 1 / 3 + 1 / 5 + 1 / 7), rel=1e-15)
    assert distance(all_primes(), 10, MINUS, 0.0) == pytest.approx(2.35238, abs=1e-5)


def test_distance_nonnegative_for_one():
    assert distance(all_primes(), 10**4, ONE, 1.0) >= 0


@pytest.mark.parametrize("z,tau", [(1j, 0.7), (cmath.exp(2j), -3.1), (0.5 - 0.5j, 12.0)])
def test_distance_matches_complex_arithmetic(z, tau):
    got = distance(all_primes(), 5000, FunctionOnPrimes((z,)), tau)
    assert got == pytest.approx(brute_distance(5000, z, tau), rel=1e-12)


def test_distance_per_part_adds_up():
    spec = mod4_partition()
    g = FunctionOnPrimes((1j, -1))
    total = distance(spec, 10**4, g, 2.5)
    assert distance(spec, 10**4, g, 2.5, 0) + distance(spec, 10**4, g, 2.5, 1) == pytest.approx(total, rel=1e-13)


def test_min_distance_of_one():
    prof = min_distance(all_primes(), 10**4, ONE)
    assert prof.delta == (0.0,)
    assert prof.tau_min == (0.0,)


def test_min_distance_below_every_sample():
    prof = min_distance(mod4_partition(), 10**4, FunctionOnPrimes((-1, -1)))
    for j in range(2):
        assert prof.delta[j] <= prof.d_values[:, j].min()
        assert prof.delta[j] > 0
    assert prof.spacing <= 1 / math.log(10**4)
    assert prof.T == pytest.approx(math.log(10**4) ** 2)
    assert all(v > 0 for v in prof.nice_indicator)


def test_grid_matches_pointwise_distance():
    prof = min_distance(mod4_partition(), 3000, FunctionOnPrimes((1j, -1)))
    for i in (0, 17, len(prof.tau_grid) // 2, len(prof.tau_grid) - 1):
        for j in range(2):
            want = distance(mod4_partition(), 3000, FunctionOnPrimes((1j, -1)), prof.tau_grid[i], j)
            assert prof.d_values[i, j] == pytest.approx(want, rel=1e-10, abs=1e-12)


def test_enlarging_T_cannot_increase_delta():
    g = FunctionOnPrimes((-1,))
    h = 1 / math.log(10**4)
    small = min_distance(all_primes(), 10**4, g, T=20 * h, spacing=h)
    big = min_distance(all_primes(), 10**4, g, T=80 * h, spacing=h)
    assert big.delta[0] <= small.delta[0]


def test_finer_grid_is_stable():
    g = FunctionOnPrimes((-1,))
    a = min_distance(all_primes(), 10**4, g)
    b = min_distance(all_primes(), 10**4, g, spacing=a.spacing / 2)
    assert abs(a.delta[0] - b.delta[0]) < 1e-6


def test_profile_exports():
    prof = min_distance(mod4_partition(), 1000, FunctionOnPrimes((-1, 1j)))
    lines = prof.to_csv().splitlines()
    assert lines[0] == "tau,part,D"
    assert len(lines) == 1 + 2 * len(prof.tau_grid)
    doc = json.loads(prof.to_json())
    assert set(doc) >= {"delta", "nice_indicator", "T", "grid_spacing"}


def test_mean_value_ratio_examples():
    assert mean_value_ratio(cached_census("all", 10), ONE) == 1
    assert mean_value_ratio(cached_census("all", 10), MINUS) == -0.4


@pytest.mark.parametrize("theta", [0.3, math.pi / 2, 2.0, math.pi])
def test_mean_value_ratio_bounded(theta):
    c = cached_census("mod4", 10**5)
    r = mean_value_ratio(c, FunctionOnPrimes.unimodular((theta, -theta / 2)))
    assert abs(r) <= 1


def test_mean_value_ratio_against_trial_division():
    g = FunctionOnPrimes((cmath.exp(0.4j), -0.5))
    spec = mod4_partition()
    assert mean_value_ratio(naive_census(spec, 5000), g) == pytest.approx(
        mean_value_ratio(cached_census("mod4", 5000), g), rel=1e-13)


def test_quarter_turn_mean_value_decays():
    g = FunctionOnPrimes.unimodular((math.pi / 2,))
    vals = [abs(mean_value_ratio(cached_census("all", x), g)) for x in (10**4, 10**5, 10**6)]
    assert vals[0] >= vals[1] >= vals[2]


def test_liouville_like_sums_match_trial_division():
    # sum_{n <= x} (-1)^omega(n) from an independent census, for the decay record
    for x in (10**4, 10**5, 10**6):
        c = naive_census(all_primes(), x)
        s = sum(cnt * (-1) ** k[0] for k, cnt in c.table.items())
        assert mean_value_ratio(cached_census("all", x), MINUS) == s / x


def test_gamma_coefficient_at_pi():
    assert GAMMA0_COEFF * math.pi**3 == pytest.approx(27 * math.pi**4 / 1024, rel=1e-15)
    assert GAMMA0_COEFF * math.pi**3 == pytest.approx(2.5681, rel=1e-3)


def test_bound_with_real_positive_values():
    spec = mod4_partition()
    prof = min_distance(spec, 1000, FunctionOnPrimes((0.5, 2.0)), T=1.0)
    g = FunctionOnPrimes((0.5, 2.0))
    assert halasz_bound_rhs(prof, g, "good") == pytest.approx(2.0**2 / 0.5, rel=1e-15)
    assert halasz_bound_rhs(prof, g, "generic") == pytest.approx(8.0, rel=1e-15)


@pytest.mark.parametrize("z", [-1, 1j, cmath.exp(2.5j), 0.5 * cmath.exp(-1j)])
def test_good_and_generic_single_part(z):
    g = FunctionOnPrimes((z,))
    prof = min_distance(all_primes(), 1000, g, T=1.0)
    (b,), beta = angle_gaps(g.z)
    assert b == beta
    gam = 27 * math.pi * beta**3 / 1024
    gap = (abs(z) - z.real) * prof.e[0]
    assert halasz_bound_rhs(prof, g, "good") == pytest.approx(abs(z) * math.exp(-gam / (2 * (1 + gam)) * gap), rel=1e-13)
    assert halasz_bound_rhs(prof, g, "generic") == pytest.approx(abs(z) * math.exp(-gam / (1 + gam) * gap), rel=1e-13)


def test_angle_gaps_grid():
    (b,), beta = angle_gaps([cmath.exp(0.5j)])
    assert b == pytest.approx(0.5, abs=1e-12)
    (b,), _ = angle_gaps([-1])
    assert b == pytest.approx(math.pi, abs=1e-12)


def test_bound_domain():
    with pytest.raises(DomainError):
        FunctionOnPrimes((0, 1))
    prof = min_distance(all_primes(), 100, ONE, T=1.0)
    with pytest.raises(DomainError):
        halasz_bound_rhs(prof, ONE, "other")
