"""Exact joint counts of restricted prime-factor counts omega_{E_j}(m) for m <= x."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetError, DomainError, ValidationError
from .partitions import PartitionSpec
from .sieve import DEFAULT_SEGMENT, primes_up_to

DEFAULT_CENSUS_BUDGET = 10**9
NAIVE_LIMIT = 10**6
MAX_PARTS = 8
# each part's count lives in one 4-bit field of an int64 key; omega(m) <= 15 for m < 2^63
_FIELD_BITS = 4
_FIELD_MASK = (1 << _FIELD_BITS) - 1

OmegaVector = tuple[int, ...]


@dataclass
class JointCensus:
    """Map from count vectors k to #{m <= x : omega_{E_j}(m) = k_j for all j}."""

    x: int
    spec_digest: str
    n_parts: int
    table: dict[OmegaVector, int]

    @property
    def max_k(self) -> OmegaVector:
        if not self.table:
            return (0,) * self.n_parts
        return tuple(max(k[j] for k in self.table) for j in range(self.n_parts))

    @property
    def mass(self) -> int:
        return sum(self.table.values())

    def count(self, k: Sequence[int]) -> int:
        return self.table.get(tuple(k), 0)

    def keys(self) -> list[OmegaVector]:
        return sorted(self.table)

    def dense(self) -> np.ndarray:
        """Counts as an (n+1)-dimensional float array indexed by k."""
        arr = np.zeros([m + 1 for m in self.max_k], dtype=np.float64)
        for k, c in self.table.items():
            arr[k] = c
        return arr

    def __eq__(self, other) -> bool:
        if not isinstance(other, JointCensus):
            return NotImplemented
        return (self.x, self.spec_digest, self.n_parts, self.table) == (
            other.x, other.spec_digest, other.n_parts, other.table)

    # -- export ---------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# x={self.x},spec_digest={self.spec_digest},parts={self.n_parts}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"k_{j}" for j in range(self.n_parts)] + ["count"])
        for k in self.keys():
            w.writerow(list(k) + [self.table[k]])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "JointCensus":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("# "):
            raise ValidationError("census CSV lacks its '# x=...' header")
        meta = dict(item.split("=", 1) for item in lines[0][2:].split(","))
        n = int(meta["parts"])
        rows = list(csv.reader(lines[1:]))
        if rows[0] != [f"k_{j}" for j in range(n)] + ["count"]:
            raise ValidationError(f"unexpected census columns {rows[0]}")
        table = {tuple(int(v) for v in r[:n]): int(r[n]) for r in rows[1:] if r}
        return cls(int(meta["x"]), meta["spec_digest"], n, table)

    def to_json(self) -> str:
        doc = {
            "x": self.x,
            "spec_digest": self.spec_digest,
            "parts": self.n_parts,
            "table": [[list(k), self.table[k]] for k in self.keys()],
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "JointCensus":
        doc = json.loads(text)
        table = {tuple(k): int(c) for k, c in doc["table"]}
        return cls(int(doc["x"]), doc["spec_digest"], int(doc["parts"]), table)


def _check_budget(spec: PartitionSpec, x: int, budget: int) -> None:
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    if x > budget:
        raise BudgetError(f"x = {x} exceeds census budget {budget}")
    if spec.n_parts > MAX_PARTS:
        raise BudgetError(f"{spec.n_parts} parts exceeds the supported maximum of {MAX_PARTS}")


def default_threads() -> int:
    env = os.environ.get("OMEGA_CENSUS_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


def _decode(code: int, n_parts: int) -> OmegaVector:
    return tuple((code >> (_FIELD_BITS * j)) & _FIELD_MASK for j in range(n_parts))


def _segment_counts(spec: PartitionSpec, lo: int, hi: int, small: np.ndarray,
                    small_w: np.ndarray) -> Counter:
    """Census of lo <= m < hi as a Counter over packed keys."""
    rem = np.arange(lo, hi, dtype=np.int64)
    code = np.zeros(hi - lo, dtype=np.int64)
    for p, w in zip(small.tolist(), small_w.tolist()):
        if p >= hi:
            break
        s = (-lo) % p
        code[s::p] += w
        rem[s::p] //= p
        pk = p * p
        while pk < hi:
            rem[(-lo) % pk :: pk] //= p
            pk *= p
    # what is left above 1 is a single prime exceeding sqrt(hi)
    big = rem > 1
    if big.any():
        parts = spec.classify_array(rem[big])
        code[big] += np.left_shift(np.int64(1), _FIELD_BITS * parts)
    keys, counts = np.unique(code, return_counts=True)
    return Counter(dict(zip(keys.tolist(), counts.tolist())))


def sieve_census(spec: PartitionSpec, x: float, budget: int = DEFAULT_CENSUS_BUDGET,
                 segment: int = DEFAULT_SEGMENT, threads: int | None = None) -> JointCensus:
    """Exact joint census by a segmented sieve over [1, x].

    Each prime up to sqrt(x) adds one to its part's field for every multiple in
    the segment and is divided out of a running cofactor; a cofactor left above
    1 is the unique prime factor beyond sqrt(x).  Segments are independent and
    merged by integer addition, so the result does not depend on ``threads``.
    """
    x = int(math.floor(x))
    _check_budget(spec, x, budget)
    small = primes_up_to(math.isqrt(x))
    small_w = np.left_shift(np.int64(1), _FIELD_BITS * spec.classify_array(small))
    bounds = [(lo, min(lo + segment, x + 1)) for lo in range(1, x + 1, segment)]
    threads = threads or default_threads()
    if threads == 1 or len(bounds) == 1:
        parts = [_segment_counts(spec, lo, hi, small, small_w) for lo, hi in bounds]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: _segment_counts(spec, b[0], b[1], small, small_w), bounds))
    total: Counter = Counter()
    for c in parts:
        total.update(c)
    table = {_decode(code, spec.n_parts): n for code, n in total.items()}
    return JointCensus(x, spec.digest, spec.n_parts, table)


def omega_vector(spec: PartitionSpec, m: int, small_primes: Iterable[int]) -> OmegaVector:
    """Distinct prime factors of m, tallied by part, by trial division."""
    k = [0] * spec.n_parts
    for p in small_primes:
        if p * p > m:
            break
        if m % p == 0:
            k[spec.classify(p)] += 1
            while m % p == 0:
                m //= p
    if m > 1:
        k[spec.classify(m)] += 1
    return tuple(k)


def naive_census(spec: PartitionSpec, x: float) -> JointCensus:
    """Trial-division census; the independent oracle for :func:`sieve_census`."""
    x = int(math.floor(x))
    if x > NAIVE_LIMIT:
        raise BudgetError(f"naive census is limited to x <= {NAIVE_LIMIT}")
    _check_budget(spec, x, NAIVE_LIMIT)
    small = primes_up_to(max(2, math.isqrt(x))).tolist()
    table: Counter = Counter(omega_vector(spec, m, small) for m in range(1, x + 1))
    return JointCensus(x, spec.digest, spec.n_parts, dict(table))


def weighted_sum(census: JointCensus, z: Sequence[complex]) -> complex:
    """sum_k count(k) * prod_j z_j^{k_j}  (with 0^0 = 1)."""
    if len(z) != census.n_parts:
        raise DomainError(f"need {census.n_parts} weights, got {len(z)}")
    z = [complex(v) for v in z]
    re, im = [], []
    for k, c in census.table.items():
        term = complex(c)
        for zj, kj in zip(z, k):
            term *= zj**kj
        re.append(term.real)
        im.append(term.imag)
    return complex(math.fsum(re), math.fsum(im))


def selberg_sum(spec: PartitionSpec, x: float, rho: float, census: JointCensus | None = None) -> float:
    """Exact sum_{n <= x} rho^omega(n)."""
    if rho <= 0:
        raise DomainError(f"rho must be positive, got {rho}")
    if census is None:
        census = sieve_census(spec, x)
    return weighted_sum(census, [rho] * census.n_parts).real


def marginal_moment(census: JointCensus, j: int) -> int:
    """sum_k k_j count(k) = sum_{m <= x} omega_{E_j}(m)."""
    if not 0 <= j < census.n_parts:
        raise DomainError(f"part {j} outside [0, {census.n_parts - 1}]")
    return sum(k[j] * c for k, c in census.table.items())


def floor_moment(spec: PartitionSpec, x: float, j: int) -> int:
    """sum over primes p <= x in part j of floor(x / p)."""
    x = int(math.floor(x))
    primes = primes_up_to(x)
    sel = primes[spec.classify_array(primes) == j]
    return int((x // sel).sum())


def recurrence_ratio(census: JointCensus, e: float, k: int) -> float:
    """(k+1) pi(x; k+1) / (E(x) pi(x; k)) for a one-part census."""
    if census.n_parts != 1:
        raise DomainError("recurrence ratio is defined for a one-part census")
    a, b = census.count((k,)), census.count((k + 1,))
    if a == 0:
        raise DomainError(f"no integers with omega = {k}")
    return (k + 1) * b / (e * a)
