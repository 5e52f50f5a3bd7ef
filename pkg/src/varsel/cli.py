"""Command-line front end.

Four subcommands, all emitting machine-readable CSV/JSON for external
plotting: ``check`` (condition reports for a concrete design/support/beta),
``select`` (one selection run: fixed-threshold MR, auto-sized MR, or lasso),
``phase`` (Monte Carlo sweep over phase points), and ``benchmark`` (the
equicorrelated-design error curves).  Exit codes: 0 ok, 2 validation
failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys

import numpy as np

from .benchmark import ExperimentConfig, run_benchmark
from .conditions import (
    ConditionParams,
    ConditionRecord,
    check_faithfulness,
    check_faithfulness_noisy,
    check_irrepresentable_uniform,
    check_min_eigenvalue,
    check_shrinkage_gap,
    incoherence,
    incoherence_bounds,
    report_to_json,
)
from .errors import (
    DimensionMismatchError,
    NumericalError,
    ValidationError,
)
from .lasso import lasso_solve
from .linalg import DesignMatrix, SupportSet, gram_partition, standardize_columns
from .marginal import (
    estimate_support_size,
    marginal_coefficients,
    threshold_select,
    top_k_screen,
)
from .phase import PhasePoint, calibrate, mc_hamming, theoretical_exponent

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _load_matrix(path: str) -> np.ndarray:
    try:
        values = np.loadtxt(path, delimiter=",", ndmin=2)
    except (ValueError, OSError) as exc:
        raise ValidationError(f"failed to parse {path}: {exc}") from exc
    return values


def _load_vector(path: str) -> np.ndarray:
    return _load_matrix(path).ravel()


def _design_from_args(args) -> DesignMatrix:
    values = _load_matrix(args.matrix)
    if args.no_standardize:
        return DesignMatrix(values, standardized=True)
    return standardize_columns(DesignMatrix(values))


def _parse_support(spec: str, p: int) -> SupportSet:
    try:
        indices = [int(tok) for tok in spec.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ValidationError(f"bad support spec {spec!r}: {exc}") from exc
    if not indices:
        raise ValidationError("support spec is empty")
    support = SupportSet.from_iterable(indices)
    if support.as_array()[-1] >= p:
        raise ValidationError(f"support index {support.as_array()[-1]} >= p = {p}")
    return support


def _write_text(out, text: str):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def cmd_check(args) -> int:
    design = _design_from_args(args)
    support = _parse_support(args.support, design.p)
    beta = _load_vector(args.beta)
    if beta.shape[0] == design.p:
        beta_s = beta[support.as_array()]
    elif beta.shape[0] == support.size:
        beta_s = beta
    else:
        raise DimensionMismatchError(
            "beta must have length p or length |support|")
    params = ConditionParams(lambda0=args.lambda0, eta=args.eta,
                             rho_min=args.rho_min, lam=args.lam,
                             sigma=args.sigma)
    gp = gram_partition(design, support)
    records = []
    records.extend(check_min_eigenvalue(gp, params))
    records.extend(check_irrepresentable_uniform(gp, params.eta))
    records.extend(check_shrinkage_gap(gp, beta_s, params))
    records.append(check_faithfulness(gp, beta_s))
    records.append(check_faithfulness_noisy(gp, beta_s, params.sigma, design.p))

    gram = design.values.T @ design.values
    mu = incoherence(gram)
    s = support.size
    mu_cap = 1.0 / (2.0 * s - 1.0) if s > 1 else float("inf")
    bounds = incoherence_bounds(mu) if mu > 0 else None
    detail = (f"coherence-based certificate at s = {s}; "
              + ("no restriction (orthogonal design)" if bounds is None else
                 f"s_max_lasso = {bounds.s_max_lasso}, s_max_mr = {bounds.s_max_mr}"))
    records.append(ConditionRecord(
        name="incoherence",
        satisfied=bool(mu < mu_cap),
        lhs=mu,
        rhs=mu_cap,
        margin=mu_cap - mu,
        detail=detail,
    ))
    _write_text(args.out, report_to_json(records) + "\n")
    return EXIT_OK


def cmd_select(args) -> int:
    design = _design_from_args(args)
    y = _load_vector(args.response)
    if args.method == "mr":
        if args.t is None:
            raise ValidationError("--t is required for method mr")
        alpha = marginal_coefficients(design, y)
        fit = threshold_select(alpha, args.t)
        doc = json.loads(fit.to_json())
        doc["method"] = "mr"
    elif args.method == "mr-auto":
        if args.sigma is None or args.sigma <= 0:
            raise ValidationError("--sigma > 0 is required for method mr-auto")
        alpha = marginal_coefficients(design, y)
        s_hat = estimate_support_size(design, y, args.sigma)
        selected = top_k_screen(alpha, s_hat)
        doc = {
            "method": "mr-auto",
            "sigma": args.sigma,
            "s_hat": s_hat,
            "selected": [int(j) for j in selected],
            "p": design.p,
        }
    else:
        if args.lam is None:
            raise ValidationError("--lambda is required for method lasso")
        fit = lasso_solve(design, y, args.lam)
        doc = json.loads(fit.to_json())
        doc["method"] = "lasso"
    _write_text(args.out, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


PHASE_HEADER = ("vartheta", "theta", "r", "p", "method", "mean_hamming", "se",
                "exact_rate", "normalized", "region", "theoretical_exponent")


def _phase_rows(config: dict):
    def as_list(value):
        return value if isinstance(value, (list, tuple)) else [value]

    known = {"vartheta", "theta", "r", "p", "n", "method", "reps", "seed",
             "standardize", "workers", "lasso_tol", "lasso_max_iter"}
    unknown = set(config) - known
    if unknown:
        raise ValidationError(f"unknown sweep config keys: {sorted(unknown)}")
    for key in ("vartheta", "theta", "r", "method", "reps", "seed"):
        if key not in config:
            raise ValidationError(f"sweep config is missing {key!r}")
    if ("p" in config) == ("n" in config):
        raise ValidationError("sweep config needs exactly one of 'p' or 'n'")

    sizes = [("p", v) for v in as_list(config.get("p"))] if "p" in config \
        else [("n", v) for v in as_list(config.get("n"))]
    methods = as_list(config["method"])
    reps = int(config["reps"])
    seed = int(config["seed"])
    standardize = bool(config.get("standardize", False))
    workers = int(config.get("workers", 1))
    kwargs = {}
    if "lasso_tol" in config:
        kwargs["lasso_tol"] = float(config["lasso_tol"])
    if "lasso_max_iter" in config:
        kwargs["lasso_max_iter"] = int(config["lasso_max_iter"])

    rows = []
    for vt, th, r, (size_kind, size), method in itertools.product(
            as_list(config["vartheta"]), as_list(config["theta"]),
            as_list(config["r"]), sizes, methods):
        point = PhasePoint(vartheta=float(vt), theta=float(th), r=float(r),
                           **{size_kind: int(size)})
        cal = calibrate(point)
        res = mc_hamming(point, method, reps, seed, standardize=standardize,
                         workers=workers, **kwargs)
        rows.append((point.vartheta, point.theta, point.r, point.p, method,
                     res.mean_hamming, res.se, res.exact_recovery_rate,
                     res.normalized, cal.region.value,
                     theoretical_exponent(point)))
    return rows


def cmd_phase(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        try:
            config = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad sweep config: {exc}") from exc
    rows = _phase_rows(config)
    _write_text(args.out, _rows_to_csv(PHASE_HEADER, rows))
    return EXIT_OK


BENCH_HEADER = ("method", "k", "pred_error", "hamming_error", "not_converged",
                "n", "p", "s", "sigma", "signal", "rho", "reps", "seed",
                "refit", "holdout", "standardize", "pred_metric")


def cmd_benchmark(args) -> int:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = ExperimentConfig.from_json(fh.read())
    else:
        config = ExperimentConfig()
    overrides = {}
    if args.reps is not None:
        overrides["reps"] = args.reps
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.sigma is not None:
        overrides["sigma"] = args.sigma
    if args.rho is not None:
        overrides["equi_rho"] = args.rho
    if args.signal is not None:
        overrides["signal_value"] = args.signal
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.refit:
        overrides["refit"] = True
    if args.holdout:
        overrides["holdout"] = True
    if args.no_standardize:
        overrides["standardize"] = False
    if overrides:
        config = ExperimentConfig(**{**_config_dict(config), **overrides})
    rows = run_benchmark(config)
    pred_metric = "holdout" if config.holdout else "in_sample"
    csv_rows = [(r.method, r.k, r.pred_error, r.hamming_error, r.not_converged,
                 config.n, config.p, config.s, config.sigma,
                 config.signal_value, config.equi_rho, config.reps,
                 config.seed, config.refit, config.holdout,
                 config.standardize, pred_metric) for r in rows]
    _write_text(args.out, _rows_to_csv(BENCH_HEADER, csv_rows))
    return EXIT_OK


def _config_dict(config: ExperimentConfig) -> dict:
    return {name: getattr(config, name)
            for name in ExperimentConfig.__dataclass_fields__}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="varsel",
        description="Variable selection via marginal regression and the lasso")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="condition report for one instance")
    check.add_argument("--matrix", required=True)
    check.add_argument("--support", required=True,
                       help="comma-separated signal column indices")
    check.add_argument("--beta", required=True,
                       help="CSV with the signal coefficients (length p or |support|)")
    check.add_argument("--lambda0", type=float, default=0.1)
    check.add_argument("--eta", type=float, default=0.1)
    check.add_argument("--rho-min", dest="rho_min", type=float, default=1.0)
    check.add_argument("--lambda", dest="lam", type=float, default=0.0)
    check.add_argument("--sigma", type=float, default=0.0)
    check.add_argument("--no-standardize", action="store_true")
    check.add_argument("--out")
    check.set_defaults(func=cmd_check)

    select = sub.add_parser("select", help="run one selection method")
    select.add_argument("--matrix", required=True)
    select.add_argument("--response", required=True)
    select.add_argument("--method", required=True,
                        choices=("mr", "mr-auto", "lasso"))
    select.add_argument("--t", type=float)
    select.add_argument("--lambda", dest="lam", type=float)
    select.add_argument("--sigma", type=float)
    select.add_argument("--no-standardize", action="store_true")
    select.add_argument("--out")
    select.set_defaults(func=cmd_select)

    phase = sub.add_parser("phase", help="Monte Carlo sweep over phase points")
    phase.add_argument("--config", required=True)
    phase.add_argument("--out")
    phase.set_defaults(func=cmd_phase)

    bench = sub.add_parser("benchmark",
                           help="error curves on equicorrelated designs")
    bench.add_argument("--config")
    bench.add_argument("--reps", type=int)
    bench.add_argument("--seed", type=int)
    bench.add_argument("--sigma", type=float)
    bench.add_argument("--rho", type=float)
    bench.add_argument("--signal", type=float)
    bench.add_argument("--workers", type=int)
    bench.add_argument("--refit", action="store_true")
    bench.add_argument("--holdout", action="store_true")
    bench.add_argument("--no-standardize", action="store_true")
    bench.add_argument("--out")
    bench.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
