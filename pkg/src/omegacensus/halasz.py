"""Halasz-type distances D_E(x; g, tau), their minima over |tau| <= T, and mean-value ratios.

Everything here is a diagnostic: the inequalities these quantities enter carry
non-effective constants, so they are computed and reported, never asserted.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .census import JointCensus, weighted_sum
from .errors import BudgetError, DomainError
from .partitions import DEFAULT_SIEVE_BUDGET, PartitionSpec, reciprocal_sums
from .sieve import primes_up_to

GAMMA0_COEFF = 27 * math.pi / 1024


@dataclass(frozen=True)
class FunctionOnPrimes:
    """Strongly multiplicative g with g(p) = z[j] for every prime p in part j."""

    z: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(complex(v) for v in self.z))
        if any(v == 0 for v in self.z):
            raise DomainError("g(p) must be non-zero on every part")

    @classmethod
    def constant(cls, value: complex, n_parts: int) -> "FunctionOnPrimes":
        return cls((complex(value),) * n_parts)

    @classmethod
    def unimodular(cls, theta: Sequence[float]) -> "FunctionOnPrimes":
        return cls(tuple(cmath.exp(1j * t) for t in theta))

    def __call__(self, k: Sequence[int]) -> complex:
        out = complex(1)
        for zj, kj in zip(self.z, k):
            out *= zj**kj
        return out

    @property
    def modulus(self) -> "FunctionOnPrimes":
        return FunctionOnPrimes(tuple(abs(v) for v in self.z))


def _prime_data(spec: PartitionSpec, x: float, budget: int):
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")
    if x > budget:
        raise BudgetError(f"x = {x:g} exceeds the sieve budget {budget:g}")
    primes = primes_up_to(x)
    return primes, spec.classify_array(primes)


def distance(spec: PartitionSpec, x: float, g: FunctionOnPrimes, tau: float, part: int | None = None,
             budget: int = DEFAULT_SIEVE_BUDGET) -> float:
    """sum over primes p <= x (in ``part``, or all when None) of (1 - Re g(p) p^{-i tau}) / p."""
    primes, parts = _prime_data(spec, x, budget)
    if part is not None:
        if not 0 <= part < spec.n_parts:
            raise DomainError(f"part {part} outside [0, {spec.n_parts - 1}]")
        primes, parts = primes[parts == part], parts[parts == part]
    zr = np.array([v.real for v in g.z])[parts]
    zi = np.array([v.imag for v in g.z])[parts]
    phase = tau * np.log(primes.astype(np.float64))
    # Re(z e^{-i phase}) = Re z cos(phase) + Im z sin(phase)
    re = zr * np.cos(phase) + zi * np.sin(phase)
    return math.fsum((1.0 - re) / primes)


@dataclass
class DistanceProfile:
    x: float
    T: float
    spacing: float
    tau_grid: np.ndarray
    d_values: np.ndarray  # shape (len(tau_grid), n_parts)
    delta: tuple[float, ...]
    tau_min: tuple[float, ...]
    e: tuple[float, ...]
    spec_digest: str

    @property
    def nice_indicator(self) -> tuple[float, ...]:
        return tuple(d / ej if ej > 0 else math.nan for d, ej in zip(self.delta, self.e))

    def to_csv(self) -> str:
        lines = ["tau,part,D"]
        for i, t in enumerate(self.tau_grid.tolist()):
            for j, d in enumerate(self.d_values[i].tolist()):
                lines.append(f"{t!r},{j},{d!r}")
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {
            "x": self.x,
            "T": self.T,
            "grid_spacing": self.spacing,
            "grid_points": int(len(self.tau_grid)),
            "spec_digest": self.spec_digest,
            "delta": list(self.delta),
            "tau_min": list(self.tau_min),
            "E": list(self.e),
            "nice_indicator": list(self.nice_indicator),
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=1)


def _grid_distances(primes: np.ndarray, parts: np.ndarray, g: FunctionOnPrimes, taus: np.ndarray,
                    n_parts: int, chunk: int = 64) -> np.ndarray:
    logp = np.log(primes.astype(np.float64))
    inv = 1.0 / primes.astype(np.float64)
    out = np.empty((len(taus), n_parts))
    for j, zj in enumerate(g.z):
        sel = parts == j
        lp, w = logp[sel], inv[sel]
        for s in range(0, len(taus), chunk):
            ph = np.outer(taus[s : s + chunk], lp)
            # form 1 - Re(...) per prime first so vanishing summands are exactly 0
            out[s : s + chunk, j] = (1.0 - zj.real * np.cos(ph) - zj.imag * np.sin(ph)) @ w
    return out


def min_distance(spec: PartitionSpec, x: float, g: FunctionOnPrimes, T: float | None = None,
                 spacing: float | None = None, budget: int = DEFAULT_SIEVE_BUDGET) -> DistanceProfile:
    """Delta_{E_j}(x; g, T) for every part: grid search, then golden-section refinement.

    T defaults to log^2 x and the grid spacing to 1/log x, the scale on which
    D oscillates.  The grid contains tau = 0.  Each reported minimum is the
    smaller of the best grid value and the refined value, so it never exceeds
    any sampled D.
    """
    L = math.log(x)
    T = L * L if T is None else float(T)
    if T <= 0:
        raise DomainError("T must be positive")
    h = 1.0 / L if spacing is None else float(spacing)
    n_side = max(1, math.ceil(T / h))
    h = T / n_side
    taus = h * np.arange(-n_side, n_side + 1)
    primes, parts = _prime_data(spec, x, budget)
    d = _grid_distances(primes, parts, g, taus, spec.n_parts)
    deltas, where = [], []
    for j in range(spec.n_parts):
        i = int(np.argmin(d[:, j]))
        best_t, best = float(taus[i]), float(d[i, j])
        exact_here = distance(spec, x, g, best_t, j, budget)
        if exact_here < best:
            best = exact_here
        lo, hi = max(-T, best_t - h), min(T, best_t + h)
        res = minimize_scalar(lambda t: distance(spec, x, g, t, j, budget), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-10})
        if res.fun < best:
            best_t, best = float(res.x), float(res.fun)
        deltas.append(best)
        where.append(best_t)
    es = reciprocal_sums(spec, x, budget)
    return DistanceProfile(float(x), T, h, taus, d, tuple(deltas), tuple(where), es.e, spec.digest)


def mean_value_ratio(census: JointCensus, g: FunctionOnPrimes) -> complex:
    """M_g(x) / M_|g|(x), both summed exactly over the census."""
    if len(g.z) != census.n_parts:
        raise DomainError(f"g has {len(g.z)} values for {census.n_parts} parts")
    num = weighted_sum(census, g.z)
    den = weighted_sum(census, g.modulus.z).real
    if den == 0:
        raise ZeroDivisionError("M_|g|(x) vanished; the census is corrupt")
    return num / den


def angle_gaps(z: Sequence[complex], phi_range: tuple[float, float] = (0.0, 1.0),
               n_angles: int = 1024) -> tuple[tuple[float, ...], float]:
    """(beta_j, beta): per-part max over phi of |arg z_j - phi|, and max over phi of the min over j."""
    phis = np.linspace(phi_range[0], phi_range[1], n_angles)
    args = np.array([cmath.phase(v) for v in z])
    gaps = np.abs(args[:, None] - phis[None, :])
    return tuple(gaps.max(axis=1).tolist()), float(gaps.min(axis=0).max())


def halasz_bound_rhs(profile: DistanceProfile, g: FunctionOnPrimes, variant: str = "good",
                     phi_range: tuple[float, float] = (0.0, 1.0), n_angles: int = 1024) -> float:
    """(B^2 / delta) exp(-F(x; g)) with B = max|z_j| and delta = min|z_j|.

    F sums a weight times (|z_j| - Re z_j) E_j(x) over parts; the weight is
    gamma_j / (2 (1 + gamma_j)) for ``"good"`` partitions and
    (delta / B) gamma / (1 + gamma) for ``"generic"`` ones, with
    gamma = 27 pi beta^3 / 1024.
    """
    if len(g.z) != len(profile.e):
        raise DomainError("g and profile disagree on the number of parts")
    mods = [abs(v) for v in g.z]
    B, dl = max(mods), min(mods)
    betas, beta = angle_gaps(g.z, phi_range, n_angles)
    gaps = [(abs(v) - v.real) * ej for v, ej in zip(g.z, profile.e)]
    if variant == "good":
        gam = [GAMMA0_COEFF * b**3 for b in betas]
        expo = sum(gj / (2 * (1 + gj)) * s for gj, s in zip(gam, gaps))
    elif variant == "generic":
        g0 = GAMMA0_COEFF * beta**3
        expo = dl / B * g0 / (1 + g0) * sum(gaps)
    else:
        raise DomainError(f"unknown variant {variant!r}")
    return B * B / dl * math.exp(-expo)
