"""Partitions of the primes into labelled parts, and prime reciprocal sums.

A partition is described by a :class:`PartitionSpec` holding one of four
rules.  Every rule classifies a prime both one at a time (``classify``) and
in bulk over a numpy array (``classify_array``); the census uses the bulk
path and the trial-division oracle the scalar one.

JSON schema (round-trips through :meth:`PartitionSpec.to_json`)::

    {"parts": 2,
     "rule": {"type": "residue_classes", "modulus": 4,
              "classes": {"1": 0, "3": 1}, "divisor_part": 0},
     "labels": ["1 mod 4", "3 mod 4"]}

Other rule forms::

    {"type": "all_primes"}
    {"type": "threshold", "y": 100}
    {"type": "explicit", "primes": [[2, 1], [3, 1]], "default": 0}
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .errors import BudgetError, ConsistencyError, DomainError, ValidationError
from .sieve import FULL_SIEVE_LIMIT, iter_prime_segments, primes_up_to, prime_sum_p2_tail_bound

EULER_GAMMA = 0.57721566490153286061
DEFAULT_SIEVE_BUDGET = 10**9


@dataclass(frozen=True)
class AllPrimes:
    def classify(self, p: int) -> int:
        return 0

    def classify_array(self, primes: np.ndarray) -> np.ndarray:
        return np.zeros(len(primes), dtype=np.int64)

    def to_dict(self) -> dict:
        return {"type": "all_primes"}


@dataclass(frozen=True)
class ResidueClasses:
    """Primes split by their class modulo ``modulus``.

    ``classes`` maps every invertible residue to a part; primes dividing the
    modulus go to ``divisor_part``.
    """

    modulus: int
    classes: tuple[tuple[int, int], ...]
    divisor_part: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValidationError(f"modulus must be >= 2, got {self.modulus}")
        object.__setattr__(self, "classes", tuple(sorted((int(r), int(j)) for r, j in self.classes)))
        q = self.modulus
        seen = {}
        for r, j in self.classes:
            if not 0 <= r < q:
                raise ValidationError(f"residue {r} out of range mod {q}")
            if math.gcd(r, q) != 1:
                raise ValidationError(f"residue {r} is not invertible mod {q}")
            if r in seen:
                raise ValidationError(f"residue {r} assigned twice")
            seen[r] = j
        missing = [r for r in range(q) if math.gcd(r, q) == 1 and r not in seen]
        if missing:
            raise ValidationError(f"invertible residues {missing} mod {q} are unassigned")
        table = np.full(q, self.divisor_part, dtype=np.int64)
        for r, j in self.classes:
            table[r] = j
        object.__setattr__(self, "_table", table)
        object.__setattr__(self, "_lookup", dict(self.classes))

    def classify(self, p: int) -> int:
        if self.modulus % p == 0:
            return self.divisor_part
        return self._lookup[p % self.modulus]

    def classify_array(self, primes: np.ndarray) -> np.ndarray:
        return self._table[primes % self.modulus]

    def to_dict(self) -> dict:
        return {
            "type": "residue_classes",
            "modulus": self.modulus,
            "classes": {str(r): j for r, j in self.classes},
            "divisor_part": self.divisor_part,
        }


@dataclass(frozen=True)
class Threshold:
    """Primes <= y form part 0, larger primes part 1."""

    y: float

    def classify(self, p: int) -> int:
        return 0 if p <= self.y else 1

    def classify_array(self, primes: np.ndarray) -> np.ndarray:
        return (primes > self.y).astype(np.int64)

    def to_dict(self) -> dict:
        y = int(self.y) if float(self.y).is_integer() else self.y
        return {"type": "threshold", "y": y}


@dataclass(frozen=True)
class Explicit:
    """A finite table of (prime, part) pairs; every other prime goes to ``default``."""

    primes: tuple[tuple[int, int], ...]
    default: int

    def __post_init__(self):
        object.__setattr__(self, "primes", tuple(sorted((int(p), int(j)) for p, j in self.primes)))
        seen = set()
        for p, _ in self.primes:
            if p < 2 or any(p % d == 0 for d in range(2, math.isqrt(p) + 1)):
                raise ValidationError(f"explicit entry {p} is not prime")
            if p in seen:
                raise ValidationError(f"prime {p} is listed twice")
            seen.add(p)
        keys = np.array([p for p, _ in self.primes], dtype=np.int64)
        vals = np.array([j for _, j in self.primes], dtype=np.int64)
        object.__setattr__(self, "_keys", keys)
        object.__setattr__(self, "_vals", vals)

    def classify(self, p: int) -> int:
        for q, j in self.primes:
            if q == p:
                return j
        return self.default

    def classify_array(self, primes: np.ndarray) -> np.ndarray:
        out = np.full(len(primes), self.default, dtype=np.int64)
        if len(self._keys):
            pos = np.searchsorted(self._keys, primes)
            pos = np.minimum(pos, len(self._keys) - 1)
            hit = self._keys[pos] == primes
            out[hit] = self._vals[pos[hit]]
        return out

    def to_dict(self) -> dict:
        return {"type": "explicit", "primes": [[p, j] for p, j in self.primes], "default": self.default}


Rule = Union[AllPrimes, ResidueClasses, Threshold, Explicit]


@dataclass(frozen=True)
class GoodnessMetadata:
    is_good_known: bool
    lam: tuple[Fraction, ...] | None = None


@dataclass(frozen=True)
class PartitionSpec:
    n_parts: int
    rule: Rule
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.n_parts < 1:
            raise ValidationError("a partition needs at least one part")
        labels = tuple(self.labels) or tuple(f"E{j}" for j in range(self.n_parts))
        if len(labels) != self.n_parts:
            raise ValidationError(f"{len(labels)} labels for {self.n_parts} parts")
        object.__setattr__(self, "labels", labels)
        for j in self._referenced_parts():
            if not 0 <= j < self.n_parts:
                raise ValidationError(f"part index {j} outside [0, {self.n_parts - 1}]")
        if isinstance(self.rule, AllPrimes) and self.n_parts != 1:
            raise ValidationError("all_primes rule has exactly one part")
        if isinstance(self.rule, Threshold) and self.n_parts != 2:
            raise ValidationError("threshold rule has exactly two parts")

    def _referenced_parts(self) -> list[int]:
        r = self.rule
        if isinstance(r, ResidueClasses):
            return [j for _, j in r.classes] + [r.divisor_part]
        if isinstance(r, Explicit):
            return [j for _, j in r.primes] + [r.default]
        if isinstance(r, Threshold):
            return [0, 1]
        return [0]

    def classify(self, p: int) -> int:
        return self.rule.classify(int(p))

    def classify_array(self, primes: np.ndarray) -> np.ndarray:
        return self.rule.classify_array(np.asarray(primes, dtype=np.int64))

    @property
    def goodness(self) -> GoodnessMetadata:
        r = self.rule
        if isinstance(r, AllPrimes):
            return GoodnessMetadata(True, (Fraction(1),))
        if isinstance(r, ResidueClasses):
            phi = len(r.classes)
            counts = [0] * self.n_parts
            for _, j in r.classes:
                counts[j] += 1
            if 0 in counts:
                # a part holding only divisors of q is finite
                return GoodnessMetadata(False)
            return GoodnessMetadata(True, tuple(Fraction(c, phi) for c in counts))
        return GoodnessMetadata(False)

    def to_dict(self) -> dict:
        return {"parts": self.n_parts, "rule": self.rule.to_dict(), "labels": list(self.labels)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]

    @classmethod
    def from_dict(cls, doc: dict) -> "PartitionSpec":
        try:
            n = int(doc["parts"])
            rd = doc["rule"]
            kind = rd["type"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"partition document missing field: {exc}") from None
        if kind == "all_primes":
            rule: Rule = AllPrimes()
        elif kind == "residue_classes":
            if "divisor_part" not in rd:
                raise ValidationError("residue_classes rule needs an explicit divisor_part")
            rule = ResidueClasses(int(rd["modulus"]), tuple((int(r), int(j)) for r, j in rd["classes"].items()),
                                  int(rd["divisor_part"]))
        elif kind == "threshold":
            rule = Threshold(rd["y"])
        elif kind == "explicit":
            if "default" not in rd:
                raise ValidationError("explicit rule needs a default part")
            rule = Explicit(tuple((int(p), int(j)) for p, j in rd["primes"]), int(rd["default"]))
        else:
            raise ValidationError(f"unknown rule type {kind!r}")
        return cls(n, rule, tuple(doc.get("labels", ())))

    @classmethod
    def from_json(cls, text: str) -> "PartitionSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad partition JSON: {exc}") from None
        return cls.from_dict(doc)

    @classmethod
    def load(cls, path) -> "PartitionSpec":
        with open(path) as fh:
            return cls.from_json(fh.read())


def all_primes() -> PartitionSpec:
    return PartitionSpec(1, AllPrimes(), ("P",))


def residue_partition(q: int, classes: dict[int, int], divisor_part: int, labels: Sequence[str] = ()) -> PartitionSpec:
    n = max(list(classes.values()) + [divisor_part]) + 1
    return PartitionSpec(n, ResidueClasses(q, tuple(classes.items()), divisor_part), tuple(labels))


def mod4_partition() -> PartitionSpec:
    """{2} and 1 mod 4 in part 0, 3 mod 4 in part 1."""
    return residue_partition(4, {1: 0, 3: 1}, 0, ("1 mod 4", "3 mod 4"))


def mod3_partition() -> PartitionSpec:
    """{3} and 1 mod 3 in part 0, 2 mod 3 in part 1."""
    return residue_partition(3, {1: 0, 2: 1}, 0, ("1 mod 3", "2 mod 3"))


def threshold_partition(y: float) -> PartitionSpec:
    return PartitionSpec(2, Threshold(y), (f"p <= {y:g}", f"p > {y:g}"))


def classify_prime(spec: PartitionSpec, p: int) -> int:
    return spec.classify(p)


def validate_partition(spec: PartitionSpec, bound: int) -> list[int]:
    """Classify every prime <= bound through both code paths; return per-part counts."""
    if bound < 2:
        raise DomainError("bound must be >= 2")
    primes = primes_up_to(bound)
    bulk = spec.classify_array(primes)
    counts = [0] * spec.n_parts
    for p, jb in zip(primes.tolist(), bulk.tolist()):
        j = spec.classify(p)
        if not 0 <= j < spec.n_parts:
            raise ValidationError(f"prime {p} is unclassified (got part {j})")
        if j != jb:
            raise ValidationError(f"prime {p} is claimed by parts {j} and {jb}")
        counts[j] += 1
    if sum(counts) != len(primes):
        raise ValidationError("part counts do not cover every prime")
    return counts


@dataclass(frozen=True)
class ReciprocalSums:
    x: float
    e: tuple[float, ...]
    b: float

    @property
    def total(self) -> float:
        return math.fsum(self.e)

    @property
    def n_parts(self) -> int:
        return len(self.e)


def _part_reciprocals(spec: PartitionSpec, x: float, budget: int) -> list[float]:
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")
    if x > budget:
        raise BudgetError(f"x = {x:g} exceeds the sieve budget {budget:g}")
    limit = int(math.floor(x))
    if limit <= FULL_SIEVE_LIMIT:
        blocks = [primes_up_to(limit)]
    else:
        blocks = iter_prime_segments(limit)
    partial: list[list[float]] = [[] for _ in range(spec.n_parts)]
    for primes in blocks:
        parts = spec.classify_array(primes)
        recip = 1.0 / primes.astype(np.float64)
        for j in range(spec.n_parts):
            partial[j].append(math.fsum(recip[parts == j]))
    return [math.fsum(v) for v in partial]


def reciprocal_sums(spec: PartitionSpec, x: float, budget: int = DEFAULT_SIEVE_BUDGET) -> ReciprocalSums:
    """E_j(x) = sum of 1/p over primes p <= x in part j, for every part."""
    return ReciprocalSums(float(x), tuple(_part_reciprocals(spec, x, budget)), mertens_constant())


@dataclass(frozen=True)
class MertensEstimate:
    value: float
    series: float
    series_tail_bound: float
    extrapolated: float
    truncation: int


def mertens_series(p0: int = 10**7) -> tuple[float, float]:
    """gamma + sum_{p <= p0} (log(1 - 1/p) + 1/p), and a bound on the omitted tail."""
    primes = primes_up_to(p0).astype(np.float64)
    terms = np.log1p(-1.0 / primes) + 1.0 / primes
    value = EULER_GAMMA + math.fsum(terms)
    # |log(1-u) + u| <= u^2 / (2 (1-u)) for 0 < u < 1
    tail = 0.5 * prime_sum_p2_tail_bound(p0) / (1.0 - 1.0 / p0)
    return value, tail


def mertens_partial_differences(ts: Sequence[float]) -> list[float]:
    """sum_{p <= t} 1/p - log log t at each t (the raw defining sequence)."""
    top = int(max(ts))
    primes = primes_up_to(top)
    recip = 1.0 / primes.astype(np.float64)
    out = []
    for t in ts:
        n = int(np.searchsorted(primes, int(t), side="right"))
        out.append(math.fsum(recip[:n]) - math.log(math.log(t)))
    return out


def mertens_extrapolated(t_max: int = 10**7) -> float:
    """Limit of the defining sequence, accelerated by Aitken's delta-squared.

    The sequence is sampled at t_max / 100, t_max / 10 and t_max; its
    decade-to-decade increments shrink roughly geometrically.
    """
    a, b, c = mertens_partial_differences([t_max / 100, t_max / 10, t_max])
    d1, d2 = b - a, c - b
    if d2 == d1:
        return c
    return c - d2 * d2 / (d2 - d1)


_MERTENS_CACHE: dict[tuple[int, int], MertensEstimate] = {}


def mertens_estimate(p0: int = 10**7, t_max: int = 10**7, tol: float = 1e-4) -> MertensEstimate:
    key = (p0, t_max)
    if key not in _MERTENS_CACHE:
        series, tail = mertens_series(p0)
        extra = mertens_extrapolated(t_max)
        if abs(series - extra) > tol:
            raise ConsistencyError(f"Mertens constant: series {series:.10f} vs extrapolation {extra:.10f}")
        _MERTENS_CACHE[key] = MertensEstimate(series, series, tail, extra, p0)
    return _MERTENS_CACHE[key]


def mertens_constant() -> float:
    """b = lim (sum_{p <= t} 1/p - log log t), cross-checked by two methods."""
    return mertens_estimate().value
