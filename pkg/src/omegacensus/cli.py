"""Command-line front end: ``omega-census <subcommand> ...``.

Exit codes: 0 success, 1 domain or validation error, 2 budget exceeded,
3 internal-consistency failure, 64 malformed command line.
"""
from __future__ import annotations

import argparse
import heapq
import itertools
import json
import math
import sys
from pathlib import Path

from . import analytic, census, halasz, partitions, transform
from .errors import BudgetError, ConsistencyError, DomainError, OmegaCensusError, ValidationError
from .partitions import PartitionSpec
from .reports import emit_report

EXIT_DOMAIN, EXIT_BUDGET, EXIT_CONSISTENCY, EXIT_USAGE = 1, 2, 3, 64
PREDICTORS = ("poisson", "goaltm", "halapp", "selberg-route")
BUILTIN_SPECS = {
    "all": partitions.all_primes,
    "mod4": partitions.mod4_partition,
    "mod3": partitions.mod3_partition,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_x(text: str) -> int:
    """'1e6' -> 1000000; scientific notation is floored to an integer."""
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v) or v < 1:
        raise argparse.ArgumentTypeError(f"x must be a finite number >= 1, got {text!r}")
    return int(math.floor(v))


def parse_x_list(text: str) -> list[int]:
    xs = [parse_x(t) for t in text.split(",") if t]
    if xs != sorted(xs):
        raise argparse.ArgumentTypeError("x list must be ascending")
    return xs


def parse_int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t]


def parse_float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t]


def parse_complex_list(text: str) -> list[complex]:
    return [complex(t.replace(" ", "")) for t in text.split(",") if t]


def load_spec(arg: str) -> PartitionSpec:
    if arg in BUILTIN_SPECS:
        return BUILTIN_SPECS[arg]()
    if arg.startswith("threshold:"):
        return partitions.threshold_partition(float(arg.split(":", 1)[1]))
    path = Path(arg)
    if not path.exists():
        raise ValidationError(f"partition spec {arg!r} is neither a file nor a builtin ({', '.join(BUILTIN_SPECS)})")
    return PartitionSpec.load(path)


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {out}: {exc.strerror}") from exc


def _fmt_of(args) -> str:
    if args.format:
        return args.format
    if args.out and args.out.endswith(".json"):
        return "json"
    return "csv"


def cmd_census(args) -> int:
    spec = load_spec(args.spec)
    c = census.sieve_census(spec, args.x, budget=args.budget, threads=args.threads)
    _write(c.to_json() + "\n" if _fmt_of(args) == "json" else c.to_csv(), args.out)
    return 0


def _select_k(args, spec, es, c) -> list[tuple[int, ...]]:
    if args.k:
        ks = [tuple(parse_int_list(part)) for part in args.k.split(";") if part]
        for k in ks:
            if len(k) != spec.n_parts:
                raise DomainError(f"k = {k} has {len(k)} components for {spec.n_parts} parts")
        return ks
    if args.k_mode == "all":
        if c is None:
            raise DomainError("k-mode 'all' needs a census (use compare)")
        return c.keys()
    # top-probability: the k with largest Poisson mass, searched in a box around the means
    hi = [max(3, int(3 * e) + 3) for e in es.e]
    if c is not None:
        hi = [m + 1 for m in c.max_k]
    box = itertools.product(*[range(h) for h in hi])
    return heapq.nlargest(args.top, box, key=lambda k: (analytic._poisson_log(es.x, es.e, k), [-v for v in k]))


def _predict_one(name, spec, es, k, c, args):
    if name == "poisson":
        return analytic.PredictionReport(es.x, "poisson", k, analytic.poisson_predict(es, k), spec.digest,
                                         analytic.rho_vector(es, k))
    if any(v == 0 for v in k):
        return None  # the other predictors need every rho_j > 0
    if name == "goaltm":
        rho_c = args.rho_common if args.rho_common is not None else analytic.mean_rho(analytic.rho_vector(es, k))
        return analytic.goaltm_predict(spec, es, k, rho_c, prefactor=args.prefactor)
    if name == "halapp":
        cc = c if c is not None else census.sieve_census(spec, es.x, budget=args.budget, threads=args.threads)
        m_f = census.weighted_sum(cc, analytic.rho_vector(es, k)).real
        return analytic.PredictionReport(es.x, "halapp", k, analytic.halapp_main_term(m_f, es, k), spec.digest,
                                         analytic.rho_vector(es, k))
    if name == "selberg-route":
        return analytic.PredictionReport(es.x, "selberg-route", k, analytic.selberg_route_predict(es, k, args.rho_common),
                                         spec.digest, analytic.rho_vector(es, k))
    raise DomainError(f"unknown predictor {name!r}")


def _run_predictions(args, with_exact: bool) -> int:
    spec = load_spec(args.spec)
    names = [p for p in args.predictors.split(",") if p]
    for p in names:
        if p not in PREDICTORS:
            raise DomainError(f"unknown predictor {p!r}; choose from {', '.join(PREDICTORS)}")
    reports = []
    for x in args.x:
        es = partitions.reciprocal_sums(spec, x, budget=args.budget)
        c = census.sieve_census(spec, x, budget=args.budget, threads=args.threads) if with_exact else None
        for k in _select_k(args, spec, es, c):
            for name in names:
                r = _predict_one(name, spec, es, tuple(k), c, args)
                if r is None:
                    continue
                if c is not None:
                    r.with_exact(c.count(k))
                reports.append(r)
    _write(emit_report(reports, None, _fmt_of(args)), args.out)
    return 0


def cmd_predict(args) -> int:
    return _run_predictions(args, with_exact=False)


def cmd_compare(args) -> int:
    return _run_predictions(args, with_exact=True)


def cmd_euler(args) -> int:
    out = []
    if args.spec:
        spec = load_spec(args.spec)
        rho = parse_float_list(args.rho)
        r = analytic.euler_product_vector(spec, rho, args.p0)
        out.append({"kind": "vector", "rho": rho, "value": r.value, "truncation_prime": r.truncation_prime,
                    "tail_bound": r.tail_bound})
    else:
        for rho in parse_float_list(args.rho):
            r = analytic.euler_product_scalar(rho, args.p0)
            out.append({"kind": "scalar", "rho": rho, "value": r.value, "truncation_prime": r.truncation_prime,
                        "tail_bound": r.tail_bound})
    _write(json.dumps(out, indent=1) + "\n", args.out)
    return 0


def cmd_halasz(args) -> int:
    spec = load_spec(args.spec)
    if args.theta is not None:
        g = halasz.FunctionOnPrimes.unimodular(parse_float_list(args.theta))
    else:
        g = halasz.FunctionOnPrimes(tuple(parse_complex_list(args.z)))
    if len(g.z) == 1 and spec.n_parts > 1:
        g = halasz.FunctionOnPrimes.constant(g.z[0], spec.n_parts)
    prof = halasz.min_distance(spec, args.x, g, T=args.T, spacing=args.spacing, budget=args.budget)
    variant = args.variant or ("good" if spec.goodness.is_good_known else "generic")
    doc = prof.summary()
    doc["variant"] = variant
    doc["bound_rhs"] = halasz.halasz_bound_rhs(prof, g, variant)
    if args.x <= args.budget:
        c = census.sieve_census(spec, args.x, budget=args.budget, threads=args.threads)
        ratio = halasz.mean_value_ratio(c, g)
        doc["mean_value_ratio"] = [ratio.real, ratio.imag]
        doc["mean_value_ratio_abs"] = abs(ratio)
    if args.profile_csv:
        Path(args.profile_csv).write_text(prof.to_csv())
    _write(json.dumps(doc, indent=1) + "\n", args.out)
    return 0


def cmd_invert(args) -> int:
    spec = load_spec(args.spec)
    sizes = parse_int_list(args.grid)
    radii = [[float(v) for v in r.split(",")] for r in args.radii.split(";") if r]
    rep = transform.cauchy_compare(spec, args.x, sizes, radii,
                                   census=census.sieve_census(spec, args.x, budget=args.budget, threads=args.threads))
    rep["tolerance"] = args.tol
    _write(json.dumps(rep, indent=1) + "\n", args.out)
    if rep["max_abs_error"] >= args.tol or rep["radius_spread"] >= args.tol:
        raise ConsistencyError(f"inversion error {rep['max_abs_error']:.3g} or spread {rep['radius_spread']:.3g} "
                               f"exceeds {args.tol:g}")
    return 0


def cmd_simul_rho(args) -> int:
    spec = load_spec(args.spec)
    es = partitions.reciprocal_sums(spec, args.x, budget=args.budget)
    rho = analytic.simul_rho(es.e, args.rho0)
    doc = {"x": args.x, "E": list(es.e), "rho0": args.rho0, "rho": rho,
           "k": list(analytic.k_for_rho(es, rho)),
           "max_dist_to_integer": max(abs(rho * e - round(rho * e)) for e in es.e),
           "threshold": max(es.e) ** (-1.0 / spec.n_parts)}
    _write(json.dumps(doc, indent=1) + "\n", args.out)
    return 0


def cmd_mertens(args) -> int:
    series, tail = partitions.mertens_series(args.p0)
    extra = partitions.mertens_extrapolated(args.t_max)
    doc = {"series": series, "series_tail_bound": tail, "truncation_prime": args.p0,
           "extrapolated": extra, "t_max": args.t_max, "difference": abs(series - extra), "tolerance": args.tol}
    _write(json.dumps(doc, indent=1) + "\n", args.out)
    if abs(series - extra) > args.tol:
        raise ConsistencyError(f"Mertens constant methods disagree by {abs(series - extra):.3g}")
    return 0


def cmd_validate(args) -> int:
    spec = load_spec(args.spec)
    counts = partitions.validate_partition(spec, args.bound)
    good = spec.goodness
    doc = {"spec_digest": spec.digest, "bound": args.bound, "labels": list(spec.labels), "prime_counts": counts,
           "is_good_known": good.is_good_known,
           "lambda": None if good.lam is None else [str(v) for v in good.lam]}
    _write(json.dumps(doc, indent=1) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="omega-census", description="Restricted prime-factor census and asymptotic predictors.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, x_list=False, spec=True):
        if spec:
            sp.add_argument("--spec", required=True, help="partition JSON file, or one of all, mod4, mod3, threshold:Y")
        if x_list:
            sp.add_argument("--x", type=parse_x_list, required=True, help="ascending comma list, e.g. 1e5,1e6")
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--budget", type=parse_x, default=census.DEFAULT_CENSUS_BUDGET)
        sp.add_argument("--threads", type=int, default=None)

    sp = sub.add_parser("census", help="exact joint census")
    common(sp)
    sp.add_argument("--x", type=parse_x, required=True)
    sp.add_argument("--format", choices=("csv", "json"))
    sp.set_defaults(func=cmd_census)

    for name, func in (("predict", cmd_predict), ("compare", cmd_compare)):
        sp = sub.add_parser(name, help=f"{name} pi(x; E, k) with the asymptotic predictors")
        common(sp, x_list=True)
        sp.add_argument("--predictors", default="poisson,goaltm")
        sp.add_argument("--k", default=None, help="explicit vectors, e.g. '1,2;2,1'")
        sp.add_argument("--k-mode", choices=("all", "top-probability"), default="top-probability")
        sp.add_argument("--top", type=int, default=10)
        sp.add_argument("--rho-common", type=float, default=None)
        sp.add_argument("--prefactor", choices=("common", "vector"), default="common")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.set_defaults(func=func)

    sp = sub.add_parser("euler", help="Euler products F(rho)")
    sp.add_argument("--spec", default=None, help="with a spec, evaluate the per-part product at a rho vector")
    sp.add_argument("--rho", required=True)
    sp.add_argument("--p0", type=parse_x, default=analytic.DEFAULT_P0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_euler)

    sp = sub.add_parser("halasz", help="distance profile, mean-value ratio and bound")
    common(sp)
    sp.add_argument("--x", type=parse_x, required=True)
    grp = sp.add_mutually_exclusive_group(required=True)
    grp.add_argument("--z", help="g(p) per part, e.g. '-1,1j'")
    grp.add_argument("--theta", help="arguments of unimodular g(p) per part")
    sp.add_argument("--T", type=float, default=None)
    sp.add_argument("--spacing", type=float, default=None)
    sp.add_argument("--variant", choices=("good", "generic"), default=None)
    sp.add_argument("--profile-csv", default=None)
    sp.set_defaults(func=cmd_halasz)

    sp = sub.add_parser("invert", help="torus inversion of the generating function vs the census")
    common(sp)
    sp.add_argument("--x", type=parse_x, required=True)
    sp.add_argument("--grid", required=True, help="points per part, e.g. 32,32")
    sp.add_argument("--radii", default="0.5;1;2", help="';'-separated radius vectors")
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.set_defaults(func=cmd_invert)

    sp = sub.add_parser("simul-rho", help="common rho with every rho E_j(x) near an integer")
    common(sp)
    sp.add_argument("--x", type=parse_x, required=True)
    sp.add_argument("--rho0", type=float, required=True)
    sp.set_defaults(func=cmd_simul_rho)

    sp = sub.add_parser("mertens", help="the Mertens constant by two methods")
    sp.add_argument("--p0", type=parse_x, default=10**7)
    sp.add_argument("--t-max", type=parse_x, default=10**7)
    sp.add_argument("--tol", type=float, default=1e-4)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_mertens)

    sp = sub.add_parser("validate", help="check a partition spec covers the primes")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--bound", type=parse_x, default=10**6)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_validate)
    return p


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ConsistencyError as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except (DomainError, ValidationError, OmegaCensusError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run())
