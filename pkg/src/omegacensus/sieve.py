"""Prime generation: a plain sieve for small bounds and a segmented one beyond."""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterator

import numpy as np

DEFAULT_SEGMENT = 1 << 22
# full-array sieving above this bound is replaced by segment iteration
FULL_SIEVE_LIMIT = 1 << 27


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    is_prime[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if is_prime[p]:
            is_prime[p * p :: 2 * p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def primes_in_range(lo: int, hi: int, base: np.ndarray | None = None) -> np.ndarray:
    """Primes p with lo <= p < hi."""
    lo = max(lo, 2)
    if hi <= lo:
        return np.empty(0, dtype=np.int64)
    if base is None:
        base = simple_sieve(math.isqrt(hi - 1))
    mark = np.ones(hi - lo, dtype=bool)
    for p in base.tolist():
        if p * p >= hi:
            break
        start = max(p * p, -(-lo // p) * p)
        mark[start - lo :: p] = False
    return np.flatnonzero(mark).astype(np.int64) + lo


def iter_prime_segments(hi: int, segment: int = DEFAULT_SEGMENT) -> Iterator[np.ndarray]:
    """Yield the primes <= hi in ascending, contiguous blocks."""
    base = simple_sieve(math.isqrt(hi))
    lo = 2
    while lo <= hi:
        top = min(lo + segment, hi + 1)
        yield primes_in_range(lo, top, base)
        lo = top


@lru_cache(maxsize=4)
def _cached_primes(limit: int) -> np.ndarray:
    if limit <= FULL_SIEVE_LIMIT:
        out = simple_sieve(limit)
    else:
        out = np.concatenate(list(iter_prime_segments(limit)))
    out.setflags(write=False)
    return out


def primes_up_to(limit: float) -> np.ndarray:
    """Read-only array of the primes <= limit (cached)."""
    return _cached_primes(int(math.floor(limit)))


def prime_sum_p2_tail_bound(p0: float) -> float:
    """Upper bound for the sum of p^-2 over primes p > p0.

    Uses pi(t) < 1.25506 t / log t (Rosser-Schoenfeld) and partial summation:
    sum_{p > p0} p^-2 <= 2 int_{p0}^inf pi(t) t^-3 dt <= 2.52 / (p0 log p0).
    """
    if p0 < 17:
        raise ValueError("tail bound requires p0 >= 17")
    return 2.52 / (p0 * math.log(p0))
