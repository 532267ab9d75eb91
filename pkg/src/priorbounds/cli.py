"""Command-line front end.

Exit codes: 0 success, 2 input error or usage, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import checks, experiments as ex
from .errors import PriorBoundsError
from .estimation import assouad_bound, fano_bound, lecam_bound, lambda_from_prior, logistic_closed_form
from .families import Bernoulli, LogisticLabels, Zipf
from .fileio import (OUTPUT_DIR_ENV, RunConfig, default_output_dir, read_regressors_csv,
                     write_curves_csv)
from .gfano import GFanoInstance, gfano_prioritized_lower
from .grid import ParamGrid, parse_prior
from .losses import LossMatrix
from .packing import Packing, max_delta, max_delta_two_point, scaled_hypercube
from .risk import make_rng
from .svg import emit_svg

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT = 0, 2, 3


class InvariantViolation(RuntimeError):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _print_result(result) -> None:
    print(json.dumps({"method": result.method, "value": result.value, "n": result.n,
                      "witness": result.witness}, indent=2, sort_keys=True, default=float))


def _family(name: str, support_size: int):
    if name == "bernoulli":
        return Bernoulli()
    if name == "zipf":
        return Zipf(support_size)
    raise ValueError(f"unknown family {name!r}")


def _regressors(args) -> np.ndarray:
    if args.z_csv:
        return read_regressors_csv(args.z_csv)
    return np.full((args.d, args.n), float(args.z))


# --- bound ------------------------------------------------------------------

def cmd_lecam(args):
    prior = parse_prior(args.prior)
    t0, t1 = sorted((args.theta0, args.theta1))
    p0, p1 = float(prior(np.array(t0))), float(prior(np.array(t1)))
    delta = max_delta_two_point(t0, t1, (p0, p1)) if args.delta is None else args.delta
    fam = _family(args.family, args.support_size)
    _print_result(lecam_bound(Packing([t0, t1], delta, [p0, p1]), fam, args.n, args.tv))


def cmd_fano(args):
    prior = parse_prior(args.prior)
    members = np.sort(np.asarray(args.members, dtype=float))
    pi = prior(members)
    delta = max_delta(members, pi) if args.delta is None else args.delta
    fam = _family(args.family, args.support_size)
    _print_result(fano_bound(Packing(members, delta, pi), fam, args.n, args.info))


def cmd_assouad(args):
    Z = _regressors(args)
    sep = scaled_hypercube(Z.shape[0], args.delta, args.pi)
    _print_result(assouad_bound(sep, LogisticLabels(Z), Z.shape[1], args.tv))


def cmd_assouad_logistic(args):
    Z = _regressors(args)
    lam = args.lam if args.pi_plus is None else lambda_from_prior(args.pi_plus, 1.0 - args.pi_plus)
    _print_result(logistic_closed_form(Z, lam))


def cmd_gfano(args):
    loss = LossMatrix.from_csv(args.loss_csv)
    grid = ParamGrid.from_prior(loss.thetas, parse_prior(args.prior))
    inst = GFanoInstance(grid, _family(args.family, args.support_size), loss, args.n, info=args.info)
    _print_result(gfano_prioritized_lower(inst, rtol=args.rtol))


# --- experiment ---------------------------------------------------------------

def _resolve(args) -> RunConfig:
    cfg = RunConfig(experiment=args.experiment, prior="both", n_list=[], seed=0)
    if args.config:
        cfg = RunConfig.from_file(args.config)
        if cfg.experiment != args.experiment:
            raise ValueError(f"config is for experiment {cfg.experiment!r}, not {args.experiment!r}")
    overrides = {k: v for k, v in (
        ("prior", args.prior), ("n_list", args.n_list), ("seed", args.seed),
        ("num_datasets", args.num_datasets), ("sizes", args.sizes), ("loss_slope", args.slope),
        ("loss_csv", args.loss_csv), ("z_csv", args.z_csv), ("zp_csv", args.zp_csv),
        ("dim", args.dim), ("num_samples", args.num_samples), ("zp_scale", args.zp_scale),
        ("lam", args.lam), ("tv", args.tv), ("info", args.info)) if v is not None}
    if args.svg:
        overrides["svg"] = True
    cfg = cfg.updated(overrides)
    if not cfg.n_list:
        default = ex.DEFAULT_N_ZIPF if cfg.experiment == "zipf" else ex.DEFAULT_N_BERNOULLI
        if cfg.experiment == "logistic":
            default = range(1, cfg.num_samples + 1)
        cfg = cfg.updated({"n_list": list(default)})
    return cfg


def _logistic_series(cfg: RunConfig):
    if cfg.z_csv:
        Z = read_regressors_csv(cfg.z_csv)
        Zp = read_regressors_csv(cfg.zp_csv) if cfg.zp_csv else cfg.zp_scale * Z
    else:
        Z = make_rng(cfg.seed).standard_normal((cfg.dim, cfg.num_samples))
        Zp = cfg.zp_scale * Z
    report = ex.logistic_experiment(Z, Zp, cfg.lam)
    series = []
    for name, label, M in (("z", "Z", Z), ("z_prime", "Z'", Zp)):
        pts = [(n, logistic_closed_form(M[:, :n], cfg.lam).value, 0.0)
               for n in cfg.n_list if 1 <= n <= M.shape[1]]
        series.append(ex.CurveSeries(name, label, pts))
    return series, report


def run_experiment(cfg: RunConfig, out_dir: Path) -> tuple[list, list[str]]:
    """Run one configured experiment; returns the series and any invariant failures."""
    failures = []
    title, y_label = "", "lower bound on prioritized risk"
    if cfg.experiment == "bernoulli":
        priors = ["beta:1,2", "uniform"] if cfg.prior == "both" else [cfg.prior]
        series = [ex.bernoulli_experiment(p if p != "beta:1,2" else "beta", cfg.n_list, cfg.tv,
                                          cfg.enumeration_cap)
                  for p in priors]
        title = "Bernoulli mean estimation"
        for s in series:
            v = s.values
            if np.any(v <= 0) or np.any(np.diff(v) > 1e-12 * v[:-1]):
                failures.append(f"{s.series}: not positive and non-increasing")
    elif cfg.experiment == "logistic":
        series, report = _logistic_series(cfg)
        print(json.dumps(dict(report.rows()), indent=2, default=float))
        title = "Logistic regression (closed form)"
        if not (report.ordering_holds and report.closed_forms_agree):
            failures.append("logistic ordering or closed-form agreement failed")
    elif cfg.experiment == "zipf":
        loss = LossMatrix.from_csv(cfg.loss_csv) if cfg.loss_csv else None
        series = ex.zipf_experiment(cfg.sizes, cfg.n_list, loss, cfg.support_size,
                                    cfg.num_exponents, cfg.loss_slope, cfg.info, cfg.gfano_rtol)
        title = "Zipfian environments"
        for small, large in zip(series, series[1:]):
            if np.any(small.values < large.values - 1e-9 * np.abs(large.values)):
                failures.append(f"{small.series} below {large.series}")
    elif cfg.experiment == "upper":
        series, cells = ex.upper_bound_experiment(cfg.n_list, cfg.num_datasets, cfg.seed,
                                                  return_cells=True)
        title, y_label = "Learner-specific prioritized risk", "prioritized risk (MC)"
        labels = [s.label for s in series]
        for cell in cells:
            for worse, better in zip(labels, labels[1:]):
                sep = ex.learner_separation(cell, worse, better)
                flag = "separated" if sep["paired_z"] > cfg.separation_threshold else "not separated"
                print(f"n={cell.n} {worse} - {better}: diff={sep['difference']:.6g} "
                      f"paired_z={sep['paired_z']:.3g} rss_z={sep['rss_z']:.3g} {flag}")
    else:
        raise ValueError(f"unknown experiment {cfg.experiment!r}")

    out_dir.mkdir(parents=True, exist_ok=True)
    stem = out_dir / cfg.experiment
    write_curves_csv(series, stem.with_suffix(".csv"))
    stem.with_suffix(".manifest.ini").write_text(cfg.to_manifest(), encoding="utf-8")
    if cfg.svg:
        svg = emit_svg(series, cfg.log_x, cfg.log_y, title, "n", y_label)
        stem.with_suffix(".svg").write_text(svg, encoding="utf-8")
    return series, failures


def cmd_experiment(args):
    cfg = _resolve(args)
    out_dir = Path(args.out) if args.out else default_output_dir()
    _, failures = run_experiment(cfg, out_dir)
    print(f"wrote {out_dir / (cfg.experiment + '.csv')}")
    if failures:
        raise InvariantViolation("; ".join(failures))


# --- oracle / selftest ----------------------------------------------------------

def cmd_oracle(args):
    rows = checks.run_sandwich()
    bad = [r for r in rows if not r.ok]
    for r in bad if not args.verbose else rows:
        print(f"{'ok  ' if r.ok else 'FAIL'} {r.case:32s} {r.bound:40s} "
              f"{r.value:.6g} <= {r.ceiling:.6g} ({r.ceiling_name})")
    print(f"{len(rows) - len(bad)}/{len(rows)} comparisons hold on "
          f"{len({r.case for r in rows})} instances")
    if bad:
        raise InvariantViolation(f"{len(bad)} sandwich violations")


def cmd_selftest(args):
    results = checks.selftest(args.seed)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.detail}")
    if not all(r.ok for r in results):
        raise InvariantViolation("self-test failed")


# --- parser ---------------------------------------------------------------------

def _add_regressor_flags(p):
    p.add_argument("--d", type=int, default=1, help="dimension d of the regressors")
    p.add_argument("--n", type=int, default=1, help="number of samples (columns of Z)")
    p.add_argument("--z", type=float, default=1.0, help="constant regressor entry z_ij")
    p.add_argument("--z-csv", help="regressor CSV (rows = samples i, columns = coordinates j)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="priorbounds", description="Lower and upper bounds on prioritized risk.",
        epilog=f"Experiment outputs default to ${OUTPUT_DIR_ENV} (else the current directory).")
    sub = parser.add_subparsers(dest="command", metavar="{bound,experiment,oracle,selftest}")
    sub.required = True

    bound = sub.add_parser("bound", help="compute one lower bound")
    bsub = bound.add_subparsers(dest="method", metavar="{lecam,fano,assouad,assouad-logistic,gfano}")
    bsub.required = True

    p = bsub.add_parser("lecam", help="two-point bound (delta/2)(1 - TV)")
    p.add_argument("--theta0", type=float, required=True)
    p.add_argument("--theta1", type=float, required=True)
    p.add_argument("--prior", default="uniform", help="uniform[:v] | beta:a,b | gauss:c[,s]")
    p.add_argument("--delta", type=float, help="packing radius (default: largest feasible)")
    p.add_argument("--n", type=int, required=True, help="sample size")
    p.add_argument("--family", choices=("bernoulli", "zipf"), default="bernoulli")
    p.add_argument("--support-size", type=int, default=400, help="Zipf support size M")
    p.add_argument("--tv", choices=("auto", "exact", "pinsker"), default="auto")
    p.set_defaults(func=cmd_lecam)

    p = bsub.add_parser("fano", help="multi-point bound delta(1 - (I + ln 2)/ln|V|)")
    p.add_argument("--members", type=_floats, required=True, help="comma-separated packing members")
    p.add_argument("--prior", default="uniform")
    p.add_argument("--delta", type=float, help="packing radius (default: largest feasible)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--family", choices=("bernoulli", "zipf"), default="bernoulli")
    p.add_argument("--support-size", type=int, default=400)
    p.add_argument("--info", choices=("mixture", "pairwise", "softmin", "best"), default="mixture",
                   help="mutual-information upper bound")
    p.set_defaults(func=cmd_fano)

    p = bsub.add_parser("assouad", help="hypercube bound for logistic regression, evaluated numerically")
    _add_regressor_flags(p)
    p.add_argument("--delta", type=float, default=0.05, help="separation half-width delta")
    p.add_argument("--pi", type=float, default=0.5, help="prior value of every vertex")
    p.add_argument("--tv", choices=("auto", "exact", "pinsker"), default="auto")
    p.set_defaults(func=cmd_assouad)

    p = bsub.add_parser("assouad-logistic", help="closed-form logistic-regression bound")
    _add_regressor_flags(p)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="prior asymmetry lambda >= 1 shared by all coordinates")
    p.add_argument("--pi-plus", type=float, help="derive lambda from pi_+ (with pi_- = 1 - pi_+)")
    p.set_defaults(func=cmd_assouad_logistic)

    p = bsub.add_parser("gfano", help="generalized Fano bound for a loss-matrix CSV")
    p.add_argument("--loss-csv", required=True, help="header = action labels, first column = theta")
    p.add_argument("--family", choices=("bernoulli", "zipf"), default="zipf")
    p.add_argument("--support-size", type=int, default=400)
    p.add_argument("--prior", default="gauss:2.5")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--info", choices=("mixture", "pairwise", "softmin", "best"), default="best")
    p.add_argument("--rtol", type=float, default=1e-6, help="golden-section tolerance on log lambda")
    p.set_defaults(func=cmd_gfano)

    exp = sub.add_parser("experiment", help="run a study and emit CSV (and optionally SVG)")
    exp.add_argument("experiment", choices=("bernoulli", "logistic", "zipf", "upper"))
    exp.add_argument("--out", help=f"output directory (default ${OUTPUT_DIR_ENV} or .)")
    exp.add_argument("--config", help="INI config or manifest; flags override it")
    exp.add_argument("--svg", action="store_true", help="also write an SVG chart")
    exp.add_argument("--seed", type=int)
    exp.add_argument("--n-list", type=_ints, help="comma-separated sample sizes")
    exp.add_argument("--prior", help="bernoulli: prior spec or 'both' (default)")
    exp.add_argument("--num-datasets", type=int, help="upper: Monte Carlo datasets per cell")
    exp.add_argument("--sizes", type=_ints, help="zipf: action-subset sizes")
    exp.add_argument("--slope", type=float, help="zipf: slope of the synthetic loss")
    exp.add_argument("--loss-csv", help="zipf: loss-matrix CSV replacing the synthetic loss")
    exp.add_argument("--z-csv", help="logistic: regressor CSV for Z")
    exp.add_argument("--zp-csv", help="logistic: regressor CSV for Z'")
    exp.add_argument("--dim", type=int, help="logistic: d for random Z")
    exp.add_argument("--num-samples", type=int, help="logistic: n for random Z")
    exp.add_argument("--zp-scale", type=float, help="logistic: Z' = scale * Z when no CSV is given")
    exp.add_argument("--lambda", dest="lam", type=float, help="logistic: lambda")
    exp.add_argument("--tv", choices=("auto", "exact", "pinsker"))
    exp.add_argument("--info", choices=("mixture", "pairwise", "softmin", "best"))
    exp.set_defaults(func=cmd_experiment)

    orc = sub.add_parser("oracle", help="brute-force validity checks")
    osub = orc.add_subparsers(dest="action", metavar="{check}")
    osub.required = True
    p = osub.add_parser("check", help="run the bound sandwich on built-in tiny instances")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("selftest", help="run the property suite")
    p.add_argument("--seed", type=int, default=checks.CHECK_SEED)
    p.set_defaults(func=cmd_selftest)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ArithmeticError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (PriorBoundsError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
