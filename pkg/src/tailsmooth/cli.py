"""Command-line interface: ``tailsmooth {simulate,estimate,theory,experiment,table1}``.

Exit codes: 0 success, 1 validation error, 2 runtime or numeric error,
3 Table 1 comparison outside tolerance.

Any subcommand accepts ``--config FILE`` holding ``key = value`` lines whose
keys are the long flag names with dashes replaced by underscores
(``sample_size``, ``master_seed``, ...). Flags given on the command line win.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import (
    DegenerateCopula,
    EmptyCell,
    InsufficientWeights,
    InvalidLambda,
    InvalidParameter,
    InvalidQuantile,
    InvalidSeries,
    MissingPair,
    NoExceedances,
    NoLimit,
    SeriesFormatError,
)
from .estimators import LAMBDA_ESTIMATORS, EstimateReport, Estimator, estimate_all
from .models import MODEL_NAMES, RFactor, Seed, StoppedClock, model_from_params, read_weights_csv, simulate
from .montecarlo import ExperimentConfig, ModelCase, default_workers, format_results_csv, reproduce_table1, run_experiment, table1_models
from .series import Level, format_series_csv, read_series_csv
from .theory import (
    SpectralWeights,
    moving_maximum_weights,
    numeric_lambda_limit,
    rfactor_joint_cdf,
    rfactor_pairwise_lambda,
    rfactor_smoothness,
    smoothness_from_pairwise,
    stopped_clock_joint_cdf,
    stopped_clock_pairwise_lambda,
)

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME, EXIT_COMPARISON = 0, 1, 2, 3
DEFAULT_SEED = 42

_VALIDATION_ERRORS = (
    InvalidParameter,
    InvalidQuantile,
    InvalidSeries,
    InsufficientWeights,
    SeriesFormatError,
    MissingPair,
    InvalidLambda,
    IndexError,
    FileNotFoundError,
    IsADirectoryError,
    PermissionError,
)
_RUNTIME_ERRORS = (NoExceedances, DegenerateCopula, NoLimit, EmptyCell, ArithmeticError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


# --- config files ----------------------------------------------------------------


def read_config(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SeriesFormatError(f"{path}: expected 'key = value'", line=lineno)
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


_ALIASES = {"seed": "master_seed", "n": "sample_size"}


def _merge_config(args, defaults: dict):
    """Fill flags left unset from the config file, then from ``defaults``."""
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    cfg = {_ALIASES.get(k, k): v for k, v in cfg.items()}
    for dest in vars(args):
        if getattr(args, dest) is None and dest in cfg:
            setattr(args, dest, cfg[dest])
    for dest, default in defaults.items():
        if getattr(args, dest, None) is None:
            setattr(args, dest, default)
    return args


def _num(value, kind, flag):
    if value is None:
        return None
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise UsageError(f"--{flag.replace('_', '-')}: invalid {kind.__name__} value {value!r}") from None


def _estimators(text) -> list[Estimator]:
    out = []
    for part in str(text).split(","):
        part = part.strip().upper()
        if not part:
            continue
        try:
            out.append(Estimator(part))
        except ValueError:
            raise UsageError(f"--estimators: unknown estimator {part!r}") from None
    if not out:
        raise UsageError("--estimators: empty list")
    return out


def _model_spec(args):
    if args.model is None:
        raise UsageError("--model is required")
    if args.model not in MODEL_NAMES:
        raise UsageError(f"--model: expected one of {', '.join(MODEL_NAMES)}, got {args.model!r}")
    params = {
        "c": _num(args.c, float, "c"),
        "p": _num(args.p, float, "p"),
        "sigma": _num(args.sigma, float, "sigma"),
        "alpha": _num(args.alpha, float, "alpha"),
        "q": _num(args.q, float, "q"),
        "weights_file": args.weights_file,
    }
    return model_from_params(args.model, **params)


def _add_model_flags(p, q_help="stop probability of the stopped-clock model, in [0, 1/2)"):
    g = p.add_argument_group("model")
    g.add_argument("--model", choices=MODEL_NAMES, default=None, help="generating process")
    g.add_argument("--c", default=None, help="mar1/mma1 coefficient in (0, 1)")
    g.add_argument("--p", default=None, help="yarp1 persistence probability in (0, 1)")
    g.add_argument("--sigma", default=None, help="yarp1 Pareto(III) scale (default 1)")
    g.add_argument("--alpha", default=None, help="yarp1 Pareto(III) shape or rfactor Frechet index (default 1)")
    g.add_argument("--q", default=None, help=q_help)
    g.add_argument("--weights-file", default=None, help="rfactor weights CSV: rows are factors, columns are times")


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _write(path, text):
    fh, close = _open_out(path)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


# --- subcommands -----------------------------------------------------------------


def cmd_simulate(args) -> int:
    _merge_config(args, {"sample_size": 1000, "master_seed": DEFAULT_SEED, "replica": 0})
    spec = _model_spec(args)
    n = _num(args.sample_size, int, "n")
    seed = Seed(_num(args.master_seed, int, "seed"), _num(args.replica, int, "replica"))
    series = simulate(spec, n, seed)
    _write(args.output, format_series_csv(series))
    truth = spec.true_lambda
    print(f"model={spec.name} {spec.param_label()} n={n} lambda={'n/a' if truth is None else format(truth, 'g')}")
    return EXIT_OK


def cmd_estimate(args) -> int:
    _merge_config(args, {"q": 0.95, "estimators": ",".join(e.value for e in LAMBDA_ESTIMATORS)})
    if args.input is None:
        raise UsageError("--input is required")
    ests = _estimators(args.estimators)
    series = read_series_csv(args.input)
    level = Level.fixed(_num(args.level, float, "level")) if args.level is not None else _num(args.q, float, "q")
    results = estimate_all(series, level, ests)
    lines = ["estimator,u,value,U,E,Cn"]
    status = EXIT_OK
    for est in ests:
        rep = results[est]
        if not isinstance(rep, EstimateReport):
            print(f"warning: {est.value} undefined: {rep}", file=sys.stderr)
            status = EXIT_RUNTIME
            lines.append(f"{est.value},,nan,,,")
            continue
        if rep.counts is None:
            lines.append(f"{est.value},,{rep.value!r},,,")
            continue
        c = rep.counts
        lines.append(f"{est.value},{c.level.u!r},{rep.value!r},{c.upcrossings},{c.exceedances},{rep.copula_diag!r}")
    _write(args.output, "\n".join(lines) + "\n")
    return status


def _theory_provider(args):
    """Return (pairwise lambda function, oracle joint-cdf factory or None, T)."""
    if args.weights_file is not None and args.model in (None, "rfactor"):
        a = read_weights_csv(args.weights_file)
        alpha = _num(args.alpha, float, "alpha") or 1.0
        spec = RFactor(alpha, a)
        w = SpectralWeights.from_model(spec)
        return (lambda i, j: rfactor_pairwise_lambda(w, i, j)), (lambda i, j: rfactor_joint_cdf(a, alpha, i, j)), w
    spec = _model_spec(args)
    if isinstance(spec, StoppedClock):
        lam = stopped_clock_pairwise_lambda(spec.q)
        return (lambda i, j: lam), (lambda i, j: stopped_clock_joint_cdf(spec.q)), None
    if spec.name == "mma1":
        a = moving_maximum_weights(spec.c, 64)
        w = SpectralWeights.from_factor_weights(a)
        return (lambda i, j: rfactor_pairwise_lambda(w, 2, 3)), (lambda i, j: rfactor_joint_cdf(a, 1.0, 2, 3)), None
    lam = spec.true_lambda
    if lam is None:
        raise UsageError(f"no closed form for model {spec.name}")
    return (lambda i, j: lam), None, None


def cmd_theory(args) -> int:
    _merge_config(args, {})
    provider, oracle, weights = _theory_provider(args)
    start = _num(args.start, int, "start")
    end = _num(args.end, int, "end")
    if weights is not None:
        start = 2 if start is None else start
        end = weights.n_times - 1 if end is None else end
    start = 1 if start is None else start
    end = start + 1 if end is None else end
    if weights is not None:
        needed = [start - 1, end + 1]
        if needed[0] < 1 or needed[1] > weights.n_times:
            raise IndexError(
                f"block ({start}, {end}) needs weight columns {needed[0]}..{needed[1]}, file has 1..{weights.n_times}"
            )
    worst = 0.0
    for i in range(start, end + 1):
        for j in (i - 1, i + 1):
            lam = provider(i, j)
            line = f"lambda({j}|{i}) = {lam:.12g}"
            if args.oracle and oracle is not None:
                est = numeric_lambda_limit(oracle(i, j))
                diff = abs(est.value - lam)
                worst = max(worst, diff)
                line += f"  oracle = {est.value:.12g}  discrepancy = {diff:.3g}"
            print(line)
    if weights is not None:
        s = rfactor_smoothness(weights, start, end)
    else:
        s = smoothness_from_pairwise(provider, start, end)
    print(f"S({start},{end}) = {s.s:.12g}")
    if args.oracle:
        if oracle is None:
            print("oracle: not available for this model (closed form is the stated truth)")
        else:
            print(f"oracle max discrepancy = {worst:.3g}")
    return EXIT_OK


def _experiment_config(args, models) -> ExperimentConfig:
    return ExperimentConfig(
        models,
        replicas=_num(args.replicas, int, "replicas"),
        sample_size=_num(args.sample_size, int, "n"),
        quantile=_num(args.quantile, float, "quantile"),
        master_seed=_num(args.master_seed, int, "seed"),
        estimators=_estimators(args.estimators),
        abias=args.abias,
    )


_EXPERIMENT_DEFAULTS = {
    "replicas": 200,
    "sample_size": 1000,
    "quantile": 0.95,
    "master_seed": DEFAULT_SEED,
    "estimators": "FF,LOG,SEC",
    "abias": "mae",
    "workers": None,
}


def _workers(args) -> int:
    w = _num(args.workers, int, "workers")
    return default_workers() if w is None else max(1, w)


def cmd_experiment(args) -> int:
    _merge_config(args, dict(_EXPERIMENT_DEFAULTS))
    if args.model is None:
        if args.truth is not None:
            raise UsageError("--truth needs --model")
        cases = table1_models()
    else:
        cases = [ModelCase(_model_spec(args), _num(args.truth, float, "truth"))]
    config = _experiment_config(args, cases)
    try:
        results = run_experiment(config, _workers(args))
        status = EXIT_OK
    except EmptyCell as exc:
        results = exc.results
        print(f"error: {exc}", file=sys.stderr)
        status = EXIT_RUNTIME
    for r in results:
        if r.skipped:
            print(f"note: {r.model_name}({r.param})/{r.estimator.value} skipped {r.skipped} of {r.replicas} replicas", file=sys.stderr)
    _write(args.output, format_results_csv(results, stamp=not args.no_timestamp))
    return status


def cmd_table1(args) -> int:
    _merge_config(args, {"master_seed": DEFAULT_SEED, "abias": "mae", "workers": None})
    report = reproduce_table1(_num(args.master_seed, int, "seed"), _workers(args), args.abias)
    stamp = not args.no_timestamp
    if args.output is not None:
        _write(args.output, report.results_csv(stamp))
    _write(args.comparison, report.comparison_csv(stamp))
    for row in report.failures():
        r = row.result
        print(
            f"outside tolerance {row.tolerance:g}: {r.model_name} {r.param} {r.estimator.value} "
            f"abias diff {row.diff_abias:.4f}, rmse diff {row.diff_rmse:.4f}",
            file=sys.stderr,
        )
    return EXIT_OK if report.passed else EXIT_COMPARISON


# --- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="tailsmooth",
        description="Smoothness and tail dependence coefficients of time series.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("simulate", help="simulate a series and write it as index,value CSV",
                       description="Simulate one series and write it as index,value CSV. "
                                   "Prints the model's true lambda (or n/a).")
    _add_model_flags(p)
    p.add_argument("--n", dest="sample_size", default=None, help="series length (default 1000)")
    p.add_argument("--seed", dest="master_seed", default=None, help=f"master seed (default {DEFAULT_SEED})")
    p.add_argument("--replica", default=None, help="replica number within the master seed (default 0)")
    p.add_argument("-o", "--output", required=True, help="CSV path to write ('-' for standard output)")
    p.add_argument("--config", default=None, help="optional key = value file; flags take precedence")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate lambda from a series CSV",
                       description="Estimate the lag-one tail dependence coefficient of a series CSV. "
                                   "Writes estimator,u,value,U,E,Cn rows.")
    p.add_argument("-i", "--input", default=None, help="series CSV with header index,value")
    p.add_argument("--estimators", default=None, help="comma list from FF,LOG,SEC,TIE (default FF,LOG,SEC)")
    p.add_argument("--q", "--quantile", dest="q", default=None, help="sample quantile defining the level (default 0.95)")
    p.add_argument("--level", default=None, help="fixed level u in (0, 1) on the uniform scale; overrides --q")
    p.add_argument("-o", "--output", default=None, help="CSV path to write (default standard output)")
    p.add_argument("--config", default=None, help="optional key = value file; flags take precedence")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("theory", help="print closed-form lambda(j|i) and S(n,m)",
                       description="Print closed-form pairwise coefficients and the smoothness coefficient "
                                   "of a block, from an r-factor weights file or a stationary model.")
    _add_model_flags(p)
    p.add_argument("--start", default=None, help="first index n of the block (weights default 2, otherwise 1)")
    p.add_argument("--end", default=None, help="last index m of the block (weights default T-1, otherwise n+1)")
    p.add_argument("--oracle", action="store_true", help="cross-check each lambda against the numeric u->1 limit")
    p.add_argument("--config", default=None, help="optional key = value file; flags take precedence")
    p.set_defaults(func=cmd_theory)

    def experiment_flags(p):
        p.add_argument("--replicas", default=None, help="number of replicas R (default 200)")
        p.add_argument("--n", dest="sample_size", default=None, help="sample size per replica (default 1000)")
        p.add_argument("--quantile", default=None, help="sample quantile defining the level (default 0.95)")
        p.add_argument("--estimators", default=None, help="comma list from FF,LOG,SEC (default all three)")

    def common_run_flags(p):
        p.add_argument("--seed", dest="master_seed", default=None, help=f"master seed (default {DEFAULT_SEED})")
        p.add_argument("--workers", default=None, help="worker processes (default: available parallelism)")
        p.add_argument("--abias", choices=("mae", "bias"), default=None,
                       help="abias as mean absolute error (mae, default) or |mean - truth| (bias)")
        p.add_argument("--no-timestamp", action="store_true", help="omit the timestamped first line of CSV output")
        p.add_argument("--config", default=None, help="optional key = value file; flags take precedence")

    p = sub.add_parser("experiment", help="Monte Carlo abias/rmse for one model or the table grid",
                       description="Replicate one model (or, without --model, the nine MAR(1), MMA(1) and "
                                   "YARP(1) models of the table) and report abias and rmse per estimator as "
                                   "model,param,estimator,true_lambda,mean_estimate,abias,rmse,skipped.")
    _add_model_flags(p)
    p.add_argument("--truth", default=None, help="override the true lambda used for abias and rmse")
    experiment_flags(p)
    common_run_flags(p)
    p.add_argument("-o", "--output", default=None, help="results CSV path (default standard output)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("table1", help="reproduce the 27-cell simulation table and compare",
                       description="Run MAR(1), MMA(1) and YARP(1) at parameters 0.25, 0.5, 0.75 with "
                                   "R=200, n=1000, u at the 95%% sample quantile, and compare with the "
                                   "published values. Exit code 3 when any cell is outside tolerance.")
    common_run_flags(p)
    p.add_argument("-o", "--output", default=None, help="results CSV path (not written when omitted)")
    p.add_argument("--comparison", default=None, help="comparison CSV path (default standard output)")
    p.set_defaults(func=cmd_table1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"tailsmooth {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except _VALIDATION_ERRORS as exc:
        print(f"tailsmooth {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except _RUNTIME_ERRORS as exc:
        print(f"tailsmooth {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
