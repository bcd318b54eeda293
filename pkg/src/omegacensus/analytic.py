"""Closed-form quantities: Gamma, Euler products, and the asymptotic predictors.

Every predictor works with logarithms and exponentiates once at the end,
since E^k / k! leaves double range for quite modest k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import exp1

from .errors import DomainError, SearchFailure
from .partitions import PartitionSpec, ReciprocalSums, all_primes
from .sieve import primes_up_to, prime_sum_p2_tail_bound

DEFAULT_P0 = 10**7
RHO_MAX = 10.0


def gamma_fn(t: float) -> float:
    if t <= 0:
        raise DomainError(f"Gamma is evaluated only for t > 0, got {t}")
    return math.gamma(t)


def log_gamma(t: float) -> float:
    if t <= 0:
        raise DomainError(f"log Gamma is evaluated only for t > 0, got {t}")
    return math.lgamma(t)


@dataclass(frozen=True)
class EulerProductResult:
    value: float
    truncation_prime: int
    tail_bound: float
    log_value: float = field(repr=False, default=0.0)


def _check_rho(rho: float) -> None:
    if not 0 < rho <= RHO_MAX:
        raise DomainError(f"rho must lie in (0, {RHO_MAX:g}], got {rho}")


def _tail_coefficient(rho: float, p0: int) -> float:
    """c with |log f_p(rho)| <= c / p^2 for every p > p0."""
    a = abs(rho - 1.0)
    return 0.5 * rho * a + (a**3 + a) / (3.0 * (p0 - max(a, 1.0)))


@lru_cache(maxsize=256)
def _log_product(spec: PartitionSpec, rho: tuple[float, ...], p0: int) -> tuple[float, float]:
    """(log of the truncated-and-tail-adjusted product, log-space tail bound).

    Factor per prime: (1 + rho/(p-1)) (1 - 1/p)^rho = (1 + (rho-1)/p) (1 - 1/p)^(rho-1),
    which is exactly 1 at rho = 1 in floating point as well.
    """
    primes = primes_up_to(p0)
    parts = spec.classify_array(primes)
    a = np.asarray(rho, dtype=np.float64)[parts] - 1.0
    u = 1.0 / primes.astype(np.float64)
    logs = np.log1p(a * u) + a * np.log1p(-u)
    total = math.fsum(logs)
    # beyond p0 each factor is exp(-rho (rho-1) / (2 p^2) + O(p^-3)); weight the
    # tail by each part's share of the primes just below p0
    top = primes > p0 // 2
    share = np.bincount(parts[top], minlength=len(rho)) / max(1, int(top.sum()))
    est = float(exp1(math.log(p0)))
    adjust = -0.5 * sum(s * r * (r - 1.0) for s, r in zip(share.tolist(), rho)) * est
    bound = max(_tail_coefficient(r, p0) for r in rho) * prime_sum_p2_tail_bound(p0)
    return total + adjust, bound


def _result(log_value: float, log_bound: float, p0: int) -> EulerProductResult:
    value = math.exp(log_value)
    return EulerProductResult(value, p0, abs(value) * math.expm1(log_bound), log_value)


def euler_product_vector(spec: PartitionSpec, rho: Sequence[float], p0: int = DEFAULT_P0) -> EulerProductResult:
    """prod_j prod_{p in E_j} (1 + rho_j/(p-1)) (1 - 1/p)^rho_j, with no Gamma factor."""
    rho = tuple(float(r) for r in rho)
    if len(rho) != spec.n_parts:
        raise DomainError(f"need {spec.n_parts} components, got {len(rho)}")
    for r in rho:
        _check_rho(r)
    return _result(*_log_product(spec, rho, int(p0)), int(p0))


def euler_product_scalar(rho: float, p0: int = DEFAULT_P0) -> EulerProductResult:
    """Gamma(rho)^-1 prod_p (1 + rho/(p-1)) (1 - 1/p)^rho, the Selberg constant."""
    _check_rho(rho)
    log_prod, bound = _log_product(all_primes(), (float(rho),), int(p0))
    return _result(log_prod - math.lgamma(rho), bound, int(p0))


def mean_rho(rho: Sequence[float]) -> float:
    return math.fsum(rho) / len(rho)


def _poisson_log(x: float, e: Sequence[float], k: Sequence[int]) -> float:
    """log of x prod_j E_j^k_j / k_j! e^-E_j."""
    out = math.log(x)
    for ej, kj in zip(e, k):
        if kj < 0:
            raise DomainError(f"negative count {kj}")
        if kj == 0:
            out -= ej
        elif ej == 0:
            return -math.inf
        else:
            out += kj * math.log(ej) - math.lgamma(kj + 1) - ej
    return out


def poisson_predict(esums: ReciprocalSums, k: Sequence[int]) -> float:
    """x times the independent-Poisson mass at k with means E_j(x)."""
    _check_len(esums, k)
    return math.exp(_poisson_log(esums.x, esums.e, k))


def selberg_predict(x: float, rho: float, p0: int = DEFAULT_P0) -> float:
    """x (log x)^(rho-1) F(rho), the main term for sum_{n <= x} rho^omega(n)."""
    if x < 3:
        raise DomainError(f"x must be >= 3, got {x}")
    f = euler_product_scalar(rho, p0)
    # x outside the exponential keeps rho = 1 exact
    return x * math.exp((rho - 1.0) * math.log(math.log(x)) + f.log_value)


def rho_vector(esums: ReciprocalSums, k: Sequence[int]) -> tuple[float, ...]:
    _check_len(esums, k)
    out = []
    for ej, kj in zip(esums.e, k):
        if ej <= 0:
            raise DomainError("rho_j = k_j / E_j(x) needs E_j(x) > 0")
        out.append(kj / ej)
    return tuple(out)


def _check_len(esums: ReciprocalSums, k: Sequence[int]) -> None:
    if len(k) != esums.n_parts:
        raise DomainError(f"k has {len(k)} components for {esums.n_parts} parts")


def _normalized_factor_log(e: Sequence[float], k: Sequence[int]) -> float:
    """log prod_j E_j^k_j / k_j! e^-k_j."""
    return math.fsum(kj * math.log(ej) - math.lgamma(kj + 1) - kj for ej, kj in zip(e, k))


def halapp_main_term(m_f: float, esums: ReciprocalSums, k: Sequence[int]) -> float:
    """M_f(x) prod_j E_j^k_j / k_j! e^-k_j, with M_f the exact sum of f_rho, rho_j = k_j/E_j."""
    _check_len(esums, k)
    if any(kj <= 0 for kj in k):
        raise DomainError("every k_j must be positive (rho_j = 0 is outside the range)")
    if m_f <= 0:
        raise DomainError("M_f(x) must be positive")
    return math.exp(math.log(m_f) + _normalized_factor_log(esums.e, k))


def stirling_factor(e: float, k: int, rho: float | None = None) -> float:
    """(2 pi rho E)^-1/2 rho^-k, the leading Stirling form of E^k/k! e^-k when rho = k / E."""
    rho = k / e if rho is None else rho
    return math.exp(-0.5 * math.log(2 * math.pi * rho * e) - k * math.log(rho))


def selberg_route_predict(esums: ReciprocalSums, k: Sequence[int], rho: float | None = None,
                          p0: int = DEFAULT_P0) -> float:
    """Main term with M_f from Selberg's asymptotic and E^k/k! e^-k in Stirling form.

    Selberg's asymptotic needs one common rho.  With ``rho`` given it is used
    throughout; otherwise the mean of rho_j = k_j / E_j(x) is used for M_f and
    each rho_j in its own Stirling factor.
    """
    rho_j = rho_vector(esums, k)
    if any(r <= 0 for r in rho_j):
        raise DomainError("every k_j must be positive")
    m_f = selberg_predict(esums.x, mean_rho(rho_j) if rho is None else rho, p0)
    return m_f * math.prod(stirling_factor(ej, kj, rho) for ej, kj in zip(esums.e, k))


@dataclass
class PredictionReport:
    x: float
    predictor: str
    k: tuple[int, ...]
    predicted: float
    spec_digest: str | None = None
    rho: tuple[float, ...] | None = None
    exact: int | None = None
    ratio: float | None = None
    error_estimate: float | None = None

    def with_exact(self, exact: int) -> "PredictionReport":
        self.exact = int(exact)
        self.ratio = exact / self.predicted if self.predicted > 0 else math.inf
        return self


def goaltm_error_terms(esums: ReciprocalSums, k: Sequence[int], rho_common: float) -> list[float]:
    """R_j = |rho - rho_j| log E_j + E_j^(-1/(n+1)) + (delta_j E_j)^(-1/6), delta_j = min(rho_j, 1)."""
    rho = rho_vector(esums, k)
    n1 = esums.n_parts
    out = []
    for ej, rj in zip(esums.e, rho):
        dj = min(rj, 1.0)
        out.append(abs(rho_common - rj) * math.log(ej) + ej ** (-1.0 / n1) + (dj * ej) ** (-1.0 / 6.0))
    return out


def goaltm_predict(spec: PartitionSpec, esums: ReciprocalSums, k: Sequence[int], rho_common: float,
                   prefactor: str = "common", p0: int = DEFAULT_P0) -> PredictionReport:
    """rho e^{-b(rho-1)} F / Gamma(M + 1) times the Poisson predictor.

    ``prefactor="common"`` evaluates F and M at the vector (rho, ..., rho), the
    form the common-rho derivation produces; ``"vector"`` uses rho_j = k_j/E_j.
    The two differ by a factor 1 + O(|rho - rho_j|), inside the reported error.
    """
    _check_len(esums, k)
    if any(kj <= 0 for kj in k):
        raise DomainError("every k_j must be positive")
    if rho_common <= 0:
        raise DomainError("rho_common must be positive")
    rho = rho_vector(esums, k)
    if prefactor == "common":
        at = (float(rho_common),) * esums.n_parts
    elif prefactor == "vector":
        at = rho
    else:
        raise DomainError(f"unknown prefactor mode {prefactor!r}")
    f = euler_product_vector(spec, at, p0)
    pre = math.log(rho_common) - esums.b * (rho_common - 1.0) + f.log_value - math.lgamma(mean_rho(at) + 1.0)
    log_pred = _poisson_log(esums.x, esums.e, k) + pre
    return PredictionReport(
        x=esums.x, predictor="goaltm", k=tuple(k), predicted=math.exp(log_pred), spec_digest=spec.digest,
        rho=rho, error_estimate=max(goaltm_error_terms(esums, k, rho_common)),
    )


def perturb_ratio(spec: PartitionSpec, u: Sequence[float], v: Sequence[float],
                  p0: int = DEFAULT_P0) -> tuple[float, float]:
    """(Gamma(M(v)+1) / Gamma(M(u)+1), F(v) / F(u)) for u, v in (0, 1/2)^(n+1)."""
    if len(u) != spec.n_parts or len(v) != spec.n_parts:
        raise DomainError("u and v need one component per part")
    if not all(0 < c < 0.5 for c in list(u) + list(v)):
        raise DomainError("components must lie in (0, 1/2)")
    if sum(abs(a - b) for a, b in zip(u, v)) >= 1:
        raise DomainError("||u - v||_1 must be < 1")
    g = math.exp(math.lgamma(mean_rho(v) + 1) - math.lgamma(mean_rho(u) + 1))
    f = math.exp(euler_product_vector(spec, v, p0).log_value - euler_product_vector(spec, u, p0).log_value)
    return g, f


def _dist_to_int(t: float) -> float:
    return abs(t - round(t))


def simul_rho(e: Sequence[float], rho0: float) -> float:
    """rho = m / E_max with |rho - rho0| < 1/E_max and every ||rho E_j|| < E_max^(-1/(n+1)).

    Scans the Dirichlet window around rho0 E_max for integers m meeting the
    simultaneous condition and returns the one nearest rho0 E_max.  Raises
    SearchFailure when that nearest admissible m is not within distance 1,
    which happens once E_max^(-1/(n+1)) < 1/2 and the E_j are badly placed.
    """
    e = [float(v) for v in e]
    if rho0 <= 0:
        raise DomainError("rho0 must be positive")
    e_max = max(e)
    if e_max <= 1:
        raise DomainError("the largest E_j(x) must exceed 1")
    n1 = len(e)
    thr = e_max ** (-1.0 / n1)
    centre = rho0 * e_max
    half = math.ceil(e_max ** ((n1 - 1) / n1)) * n1 + 1
    best = None
    for m in range(max(1, math.floor(centre) - half), math.ceil(centre) + half + 1):
        rho = m / e_max
        if max(_dist_to_int(rho * ej) for ej in e) < thr:
            if best is None or abs(m - centre) < abs(best - centre):
                best = m
    if best is None or abs(best - centre) >= 1:
        raise SearchFailure(
            f"no m with |m - {centre:.6g}| < 1 and max ||m E_j / E_max|| < {thr:.6g}"
            + ("" if best is None else f" (nearest admissible m = {best})"))
    return best / e_max


def k_for_rho(esums: ReciprocalSums, rho: float) -> tuple[int, ...]:
    """Nearest integers to rho E_j(x)."""
    return tuple(int(round(rho * ej)) for ej in esums.e)
