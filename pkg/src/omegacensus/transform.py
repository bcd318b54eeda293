"""Coefficient extraction from the joint generating function on a torus.

sum_{m <= x} prod_j z_j^{omega_{E_j}(m)} is a polynomial in the z_j whose
coefficients are the census counts.  Sampled at z_j = rho_j e^{2 pi i a_j / N_j}
with N_j above the degree in z_j, an inverse DFT recovers every coefficient
exactly (up to rounding), whatever the radii.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .census import JointCensus, sieve_census
from .errors import BudgetError, DegreeBoundError, DomainError
from .partitions import PartitionSpec
from .sieve import primes_up_to

DIRECT_X_LIMIT = 10**5
DIRECT_GRID_LIMIT = 4096


@dataclass
class TorusGrid:
    radii: tuple[float, ...]
    sizes: tuple[int, ...]
    values: np.ndarray  # complex, shape == sizes

    def to_json(self) -> str:
        rows = [[list(idx), float(v.real), float(v.imag)] for idx, v in np.ndenumerate(self.values)]
        return json.dumps({"radii": list(self.radii), "sizes": list(self.sizes), "values": rows})

    @classmethod
    def from_json(cls, text: str) -> "TorusGrid":
        doc = json.loads(text)
        sizes = tuple(doc["sizes"])
        values = np.zeros(sizes, dtype=np.complex128)
        for idx, re, im in doc["values"]:
            values[tuple(idx)] = complex(re, im)
        return cls(tuple(doc["radii"]), sizes, values)


def _power_tables(radii: Sequence[float], sizes: Sequence[int], degrees: Sequence[int]) -> list[np.ndarray]:
    """Per part, the matrix (rho e^{2 pi i a / N})^k indexed [a, k]."""
    out = []
    for r, n, d in zip(radii, sizes, degrees):
        a = np.arange(n)[:, None]
        k = np.arange(d + 1)[None, :]
        out.append(r**k * np.exp(2j * np.pi * ((a * k) % n) / n))
    return out


def _check_grid(radii, sizes, n_parts):
    if len(radii) != n_parts or len(sizes) != n_parts:
        raise DomainError(f"need {n_parts} radii and sizes")
    if any(r <= 0 for r in radii):
        raise DomainError("radii must be positive")


def omega_vectors_spf(spec: PartitionSpec, x: int) -> np.ndarray:
    """omega_{E_j}(m) for 1 <= m <= x via a smallest-prime-factor table.

    Deliberately shares no code with the census sieve; returns shape (x, n_parts).
    """
    spf = np.zeros(x + 1, dtype=np.int64)
    for p in primes_up_to(x).tolist():
        if p * p > x:
            break
        block = spf[p * p :: p]
        block[block == 0] = p
    idx = np.arange(x + 1)
    unset = spf == 0
    spf[unset] = idx[unset]
    part_of = np.zeros(x + 1, dtype=np.int64)
    pr = primes_up_to(x)
    part_of[pr] = spec.classify_array(pr)
    out = np.zeros((x + 1, spec.n_parts), dtype=np.int64)
    rem = idx.copy()
    last = np.zeros(x + 1, dtype=np.int64)
    live = rem > 1
    while live.any():
        rows = np.flatnonzero(live)
        p = spf[rem[rows]]
        fresh = p != last[rows]
        np.add.at(out, (rows[fresh], part_of[p[fresh]]), 1)
        last[rows] = p
        rem[rows] //= p
        live = rem > 1
    return out[1:]


def evaluate_grid(radii: Sequence[float], sizes: Sequence[int], census: JointCensus | None = None,
                  spec: PartitionSpec | None = None, x: float | None = None, mode: str = "from_census",
                  chunk: int = 512) -> TorusGrid:
    """Values of sum_{m <= x} f_z(m) on the torus grid.

    ``from_census`` contracts the dense census tensor against per-part power
    tables.  ``direct_sieve`` sums f_z(m) integer by integer from an
    independent factorisation (x <= 10^5 and at most 4096 grid points).
    """
    radii = tuple(float(r) for r in radii)
    sizes = tuple(int(n) for n in sizes)
    if mode == "from_census":
        if census is None:
            if spec is None or x is None:
                raise DomainError("from_census needs a census or a spec and x")
            census = sieve_census(spec, x)
        _check_grid(radii, sizes, census.n_parts)
        deg = census.max_k
        for j, (n, d) in enumerate(zip(sizes, deg)):
            if n <= d:
                raise DegreeBoundError(f"part {j}: {n} grid points cannot resolve degree {d}")
        vals = census.dense().astype(np.complex128)
        for j, tab in enumerate(_power_tables(radii, sizes, deg)):
            # contract axis j (degree) against tab[a, k]; the new axis goes last
            vals = np.tensordot(vals, tab, axes=([0], [1]))
        return TorusGrid(radii, sizes, vals)
    if mode == "direct_sieve":
        if spec is None or x is None:
            raise DomainError("direct_sieve needs a spec and x")
        x = int(math.floor(x))
        _check_grid(radii, sizes, spec.n_parts)
        if x > DIRECT_X_LIMIT:
            raise BudgetError(f"direct_sieve is limited to x <= {DIRECT_X_LIMIT}")
        if math.prod(sizes) > DIRECT_GRID_LIMIT:
            raise BudgetError(f"direct_sieve is limited to {DIRECT_GRID_LIMIT} grid points")
        om = omega_vectors_spf(spec, x)
        deg = om.max(axis=0).tolist()
        for j, (n, d) in enumerate(zip(sizes, deg)):
            if n <= d:
                raise DegreeBoundError(f"part {j}: {n} grid points cannot resolve degree {d}")
        tabs = _power_tables(radii, sizes, deg)
        total = np.zeros(sizes, dtype=np.complex128)
        for s in range(0, x, chunk):
            block = om[s : s + chunk]
            acc = tabs[0][:, block[:, 0]].T
            for j in range(1, spec.n_parts):
                acc = acc[..., None] * tabs[j][:, block[:, j]].T.reshape((len(block),) + (1,) * j + (sizes[j],))
            total += acc.sum(axis=0)
        return TorusGrid(radii, sizes, total)
    raise DomainError(f"unknown mode {mode!r}")


def invert(grid: TorusGrid) -> np.ndarray:
    """Recovered counts indexed by k (array of shape grid.sizes).

    recovered(k) = prod_j rho_j^{-k_j} (prod_j N_j)^{-1} sum_a e^{-2 pi i k.a/N} values(a).
    """
    coeff = np.fft.fftn(grid.values) / grid.values.size
    for j, (r, n) in enumerate(zip(grid.radii, grid.sizes)):
        shape = [1] * len(grid.sizes)
        shape[j] = n
        coeff = coeff * (r ** -np.arange(n, dtype=np.float64)).reshape(shape)
    return coeff.real


def recovered_map(grid: TorusGrid) -> dict[tuple[int, ...], float]:
    rec = invert(grid)
    return {tuple(int(i) for i in idx): float(v) for idx, v in np.ndenumerate(rec)}


def parseval_mass(grid: TorusGrid) -> float:
    return float(np.sum(np.abs(grid.values) ** 2) / grid.values.size)


def max_inversion_error(census: JointCensus, grid: TorusGrid) -> float:
    """max |recovered(k) - count(k)| over the census degree box 0 <= k_j <= max_k_j."""
    rec = invert(grid)
    box = tuple(slice(0, d + 1) for d in census.max_k)
    return float(np.max(np.abs(rec[box] - census.dense())))


def cauchy_compare(spec: PartitionSpec, x: float, sizes: Sequence[int],
                   radii_list: Sequence[Sequence[float]] = ((1.0,),), census: JointCensus | None = None) -> dict:
    """Invert at every radius vector and compare with the census.

    Reports the worst absolute error over the census degree box and the
    spread of the recovered counts across radii (absolute, and relative to
    max(1, count)).
    """
    if census is None:
        census = sieve_census(spec, x)
    box = tuple(slice(0, d + 1) for d in census.max_k)
    exact = census.dense()
    recs, errors = [], []
    for radii in radii_list:
        radii = tuple(radii) if len(radii) == census.n_parts else (radii[0],) * census.n_parts
        grid = evaluate_grid(radii, sizes, census=census)
        rec = invert(grid)[box]
        recs.append(rec)
        errors.append(float(np.max(np.abs(rec - exact))))
    stack = np.stack(recs)
    spread = stack.max(axis=0) - stack.min(axis=0)
    return {
        "x": census.x,
        "spec_digest": census.spec_digest,
        "sizes": list(sizes),
        "radii": [list(r) for r in radii_list],
        "max_k": list(census.max_k),
        "max_abs_error": max(errors),
        "errors_by_radius": errors,
        "radius_spread": float(spread.max()),
        "radius_spread_relative": float((spread / np.maximum(1.0, exact)).max()),
    }
