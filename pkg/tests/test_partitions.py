import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from omegacensus import ConsistencyError, DomainError, ValidationError
from omegacensus.partitions import (
    EULER_GAMMA,
    Explicit,
    PartitionSpec,
    all_primes,
    classify_prime,
    mertens_estimate,
    mertens_partial_differences,
    mertens_series,
    mod3_partition,
    mod4_partition,
    reciprocal_sums,
    residue_partition,
    threshold_partition,
    validate_partition,
)
from omegacensus.sieve import primes_up_to, simple_sieve


def trial_primes(n):
    return [p for p in range(2, n + 1) if all(p % d for d in range(2, math.isqrt(p) + 1))]


def test_sieve_matches_trial_division():
    assert primes_up_to(2000).tolist() == trial_primes(2000)
    assert len(primes_up_to(10**6)) == 78498


@pytest.mark.parametrize("p,part", [(13, 0), (2, 0), (7, 1), (5, 0), (3, 1)])
def test_classify_mod4(mod4, p, part):
    assert classify_prime(mod4, p) == part


def test_reciprocal_sums_small():
    e = reciprocal_sums(all_primes(), 10).e
    assert e[0] == pytest.approx(1 / 2 + 1 / 3 + 1 / 5 + 1 / 7, rel=1e-15)
    e4 = reciprocal_sums(mod4_partition(), 10).e
    assert e4[0] == pytest.approx(0.7, rel=1e-15)
    assert e4[1] == pytest.approx(1 / 3 + 1 / 7, rel=1e-15)
    assert reciprocal_sums(all_primes(), 2).e == (0.5,)


def test_reciprocal_sums_domain():
    with pytest.raises(DomainError):
        reciprocal_sums(all_primes(), 1.5)


@pytest.mark.parametrize("spec", [mod4_partition(), mod3_partition(), threshold_partition(100)], ids=str)
def test_parts_add_up_to_full_sum(spec):
    for x in (1e3, 1e5, 1e6):
        parts = reciprocal_sums(spec, x).e
        full = reciprocal_sums(all_primes(), x).e[0]
        assert math.fsum(parts) == pytest.approx(full, rel=1e-12)
        assert min(parts) >= 0


def test_reciprocal_sums_monotone(mod4):
    prev = None
    for x in (10, 100, 1e3, 1e4, 1e5):
        e = reciprocal_sums(mod4, x).e
        if prev:
            assert all(a >= b for a, b in zip(e, prev))
        prev = e


def test_validate_partition_counts(mod4):
    assert validate_partition(mod4, 10) == [2, 2]
    assert validate_partition(all_primes(), 10) == [4]


@pytest.mark.parametrize("spec", [mod4_partition(), mod3_partition(), threshold_partition(100),
                                  residue_partition(12, {1: 0, 5: 1, 7: 2, 11: 0}, 2)], ids=str)
def test_totality_to_a_million(spec):
    counts = validate_partition(spec, 10**6)
    assert sum(counts) == 78498


def test_explicit_without_default_is_rejected():
    doc = {"parts": 2, "rule": {"type": "explicit", "primes": [[2, 1]]}}
    with pytest.raises(ValidationError):
        PartitionSpec.from_dict(doc)


def test_residue_classes_must_be_total():
    with pytest.raises(ValidationError):
        residue_partition(5, {1: 0, 2: 1, 3: 1}, 0)
    with pytest.raises(ValidationError):
        residue_partition(4, {1: 0, 2: 1, 3: 1}, 0)
    doc = {"parts": 2, "rule": {"type": "residue_classes", "modulus": 4, "classes": {"1": 0, "3": 1}}}
    with pytest.raises(ValidationError):
        PartitionSpec.from_dict(doc)


def test_part_index_out_of_range():
    with pytest.raises(ValidationError):
        PartitionSpec(2, Explicit(((2, 5),), 0))


def test_explicit_partition_classifies():
    spec = PartitionSpec(3, Explicit(((2, 1), (3, 2)), 0))
    assert [spec.classify(p) for p in (2, 3, 5, 7)] == [1, 2, 0, 0]
    assert spec.classify_array(np.array([2, 3, 5, 7])).tolist() == [1, 2, 0, 0]


@pytest.mark.parametrize("spec", [all_primes(), mod4_partition(), threshold_partition(100),
                                  PartitionSpec(2, Explicit(((2, 1), (3, 1)), 0), ("rest", "small"))], ids=str)
def test_json_round_trip(spec):
    again = PartitionSpec.from_json(spec.to_json())
    assert again == spec
    assert again.to_json() == spec.to_json()
    assert again.digest == spec.digest


def test_goodness_metadata():
    g = residue_partition(12, {1: 0, 5: 1, 7: 1, 11: 1}, 0).goodness
    assert g.is_good_known
    assert g.lam == (Fraction(1, 4), Fraction(3, 4))
    assert sum(g.lam) == 1
    assert not threshold_partition(100).goodness.is_good_known
    assert mod4_partition().goodness.lam == (Fraction(1, 2), Fraction(1, 2))


@settings(max_examples=40, deadline=None)
@given(q=st.integers(2, 30), data=st.data())
def test_residue_lambda_sums_to_one(q, data):
    units = [r for r in range(q) if math.gcd(r, q) == 1]
    n = data.draw(st.integers(1, 4))
    assign = {r: data.draw(st.integers(0, n - 1)) for r in units}
    spec = residue_partition(q, assign, 0)
    g = spec.goodness
    if g.is_good_known:
        assert sum(g.lam) == 1
    counts = validate_partition(spec, 2000)
    assert sum(counts) == len(primes_up_to(2000))


def test_mertens_first_term_and_probe():
    assert math.log(0.5) + 0.5 == pytest.approx(-0.19315, abs=1e-5)
    (d,) = mertens_partial_differences([10])
    assert d == pytest.approx(1.1761904761904762 - math.log(math.log(10)), abs=1e-12)
    assert d == pytest.approx(0.34216, abs=1e-5)


def test_mertens_two_methods_agree():
    est = mertens_estimate()
    assert abs(est.series - est.extrapolated) < 1e-4
    assert est.value == pytest.approx(0.2614972, abs=1e-7)


def test_mertens_truncation_within_tail_bound():
    v6, tail6 = mertens_series(10**6)
    v7, _ = mertens_series(10**7)
    assert abs(v7 - v6) < tail6


def test_mertens_series_uses_gamma_literal():
    assert EULER_GAMMA == pytest.approx(0.5772156649015329, abs=0)


def test_mertens_disagreement_raises(monkeypatch):
    from omegacensus import partitions

    monkeypatch.setattr(partitions, "mertens_extrapolated", lambda t_max: 0.3)
    partitions._MERTENS_CACHE.clear()
    try:
        with pytest.raises(ConsistencyError):
            partitions.mertens_estimate(p0=10**5, t_max=10**5)
    finally:
        partitions._MERTENS_CACHE.clear()


def test_simple_sieve_edges():
    assert simple_sieve(1).tolist() == []
    assert simple_sieve(2).tolist() == [2]
    assert simple_sieve(3).tolist() == [2, 3]
