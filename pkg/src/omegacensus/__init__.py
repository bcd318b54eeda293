"""Exact census and asymptotics for counts of restricted prime factors."""
from .analytic import (
    EulerProductResult,
    PredictionReport,
    euler_product_scalar,
    euler_product_vector,
    gamma_fn,
    goaltm_predict,
    halapp_main_term,
    mean_rho,
    perturb_ratio,
    poisson_predict,
    selberg_predict,
    selberg_route_predict,
    simul_rho,
)
from .census import JointCensus, marginal_moment, naive_census, selberg_sum, sieve_census, weighted_sum
from .errors import (
    BudgetError,
    ConsistencyError,
    DegreeBoundError,
    DomainError,
    OmegaCensusError,
    SearchFailure,
    ValidationError,
)
from .halasz import FunctionOnPrimes, DistanceProfile, distance, halasz_bound_rhs, mean_value_ratio, min_distance
from .partitions import (
    PartitionSpec,
    ReciprocalSums,
    all_primes,
    classify_prime,
    mertens_constant,
    mod3_partition,
    mod4_partition,
    reciprocal_sums,
    residue_partition,
    threshold_partition,
    validate_partition,
)
from .transform import TorusGrid, cauchy_compare, evaluate_grid, invert

__version__ = "0.1.0"
