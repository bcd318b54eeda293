import itertools
import math

import numpy as np
import pytest

from omegacensus import BudgetError, DegreeBoundError, naive_census
from omegacensus.census import weighted_sum
from omegacensus.partitions import all_primes, mod4_partition, residue_partition
from omegacensus.transform import (
    TorusGrid,
    cauchy_compare,
    evaluate_grid,
    invert,
    max_inversion_error,
    omega_vectors_spf,
    parseval_mass,
    recovered_map,
)

from conftest import cached_census


def test_four_point_grid_x10():
    g = evaluate_grid((1.0,), (4,), census=cached_census("all", 10))
    want = [10, complex(-1, 7), -4, complex(-1, -7)]
    assert np.allclose(g.values, want, atol=1e-13)
    rec = recovered_map(g)
    for k, c in {0: 1, 1: 7, 2: 2, 3: 0}.items():
        assert abs(rec[(k,)] - c) < 1e-12


def test_spf_vectors_match_trial_division():
    spec = mod4_partition()
    om = omega_vectors_spf(spec, 3000)
    from collections import Counter

    assert dict(Counter(map(tuple, om.tolist()))) == naive_census(spec, 3000).table


@pytest.mark.parametrize("name,sizes", [("all", (8,)), ("mod4", (8, 8)), ("threshold100", (6, 6))])
def test_direct_and_census_paths_agree(name, sizes):
    from conftest import SPECS

    spec = SPECS[name]()
    x = 2 * 10**4
    c = cached_census(name, x)
    radii = (0.7,) * spec.n_parts
    a = evaluate_grid(radii, sizes, census=c)
    b = evaluate_grid(radii, sizes, spec=spec, x=x, mode="direct_sieve")
    assert np.max(np.abs(a.values - b.values)) <= 1e-9 * np.max(np.abs(a.values))


def test_origin_is_mass_and_weighted_sum():
    c = cached_census("mod4", 10**4)
    g = evaluate_grid((1.0, 1.0), (8, 8), census=c)
    assert g.values[0, 0] == pytest.approx(10**4, rel=1e-14)
    g2 = evaluate_grid((0.5, 2.0), (8, 8), census=c)
    assert g2.values[0, 0] == pytest.approx(weighted_sum(c, (0.5, 2.0)), rel=1e-13)


def test_conjugate_symmetry():
    g = evaluate_grid((1.3, 0.8), (9, 8), census=cached_census("mod4", 10**4))
    v = g.values
    for a in itertools.product(range(9), range(8)):
        neg = ((-a[0]) % 9, (-a[1]) % 8)
        assert v[neg] == pytest.approx(np.conj(v[a]), rel=1e-12, abs=1e-9)


@pytest.mark.parametrize("rho", [0.5, 1.0, 2.0])
def test_inversion_is_radius_invariant(rho):
    c = cached_census("mod4", 10**4)
    g = evaluate_grid((rho, rho), (16, 16), census=c)
    assert max_inversion_error(c, g) < 1e-6
    assert recovered_map(g)[(0, 0)] == pytest.approx(1, abs=1e-8)


def test_exact_inversion_bound_up_to_a_million():
    c = cached_census("mod4", 10**6)
    g = evaluate_grid((1.0, 1.0), (16, 16), census=c)
    assert max_inversion_error(c, g) < 1e-6 * math.sqrt(10**6)


def test_parseval():
    c = cached_census("mod4", 10**4)
    g = evaluate_grid((1.0, 1.0), (12, 12), census=c)
    want = float(sum(v * v for v in c.table.values()))
    assert parseval_mass(g) == pytest.approx(want, rel=1e-6)


def test_degree_bound():
    c = cached_census("all", 10)
    with pytest.raises(DegreeBoundError):
        evaluate_grid((1.0,), (2,), census=c)
    with pytest.raises(DegreeBoundError):
        evaluate_grid((1.0,), (2,), spec=all_primes(), x=10, mode="direct_sieve")


def test_direct_budget():
    with pytest.raises(BudgetError):
        evaluate_grid((1.0,), (8,), spec=all_primes(), x=10**6, mode="direct_sieve")
    with pytest.raises(BudgetError):
        evaluate_grid((1.0, 1.0), (128, 64), spec=mod4_partition(), x=100, mode="direct_sieve")


def test_cauchy_compare_small():
    rep = cauchy_compare(all_primes(), 10, (4,), [(1.0,)])
    assert rep["max_abs_error"] < 1e-12


def test_cauchy_compare_three_parts():
    spec = residue_partition(5, {1: 0, 2: 1, 3: 2, 4: 1}, 2)
    rep = cauchy_compare(spec, 2 * 10**4, (8, 8, 8), [(0.5,), (1.0,), (2.0,)])
    assert rep["max_abs_error"] < 1e-6
    assert rep["radius_spread_relative"] < 1e-6


def test_grid_json_round_trip():
    g = evaluate_grid((1.0, 2.0), (4, 5), census=cached_census("mod4", 100))
    again = TorusGrid.from_json(g.to_json())
    assert again.sizes == g.sizes and again.radii == g.radii
    assert np.array_equal(again.values, g.values)
    assert np.array_equal(invert(again), invert(g))
