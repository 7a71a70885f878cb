"""Replicated simulation experiments: bias and rmse of the lambda estimators.

Replica ``r`` of every model is simulated from ``Seed(master_seed, r)``, so
results do not depend on how replicas are spread over worker processes.
Estimates are stored by replica index and reduced in that order after all
workers finish, which keeps the floating-point sums reproducible.
"""

from __future__ import annotations

import datetime as _dt
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .errors import EmptyCell, InvalidParameter
from .estimators import LAMBDA_ESTIMATORS, EstimateReport, Estimator, estimate_all
from .models import Mar1, Mma1, ModelSpec, Seed, Yarp1, simulate

ABIAS_MODES = ("mae", "bias")


@dataclass(frozen=True)
class ModelCase:
    """One model of an experiment, optionally with an overridden truth."""

    spec: ModelSpec
    truth: float | None = None
    sampler: Callable | None = field(default=None, compare=False)

    @property
    def true_lambda(self) -> float:
        value = self.truth if self.truth is not None else self.spec.true_lambda
        if value is None:
            raise InvalidParameter(f"model {self.spec.name} has no known lambda; pass a truth override")
        return float(value)


@dataclass(frozen=True)
class ExperimentConfig:
    models: Sequence[ModelCase]
    replicas: int = 200
    sample_size: int = 1000
    quantile: float = 0.95
    master_seed: int = 42
    estimators: Sequence[Estimator] = LAMBDA_ESTIMATORS
    abias: str = "mae"

    def __post_init__(self):
        object.__setattr__(
            self, "models", tuple(m if isinstance(m, ModelCase) else ModelCase(m) for m in self.models)
        )
        object.__setattr__(self, "estimators", tuple(Estimator(e) for e in self.estimators))
        if not self.models:
            raise InvalidParameter("experiment needs at least one model")
        if self.replicas < 1:
            raise InvalidParameter(f"replicas must be >= 1, got {self.replicas}")
        if self.sample_size < 2:
            raise InvalidParameter(f"sample_size must be >= 2, got {self.sample_size}")
        if not (0.0 < self.quantile < 1.0):
            raise InvalidParameter(f"quantile must lie in (0, 1), got {self.quantile}")
        if Estimator.TIE in self.estimators:
            raise InvalidParameter("the tie-rate estimator is not part of the lambda experiments")
        if self.abias not in ABIAS_MODES:
            raise InvalidParameter(f"abias must be one of {ABIAS_MODES}, got {self.abias!r}")
        for case in self.models:
            case.true_lambda  # fail early on models without a truth


@dataclass(frozen=True)
class ExperimentResult:
    """Aggregates of one (model, estimator) cell.

    ``abias`` is whichever of ``mae`` (mean absolute error) or ``|bias|``
    the experiment asked for; both are always kept.
    """

    model: ModelSpec
    estimator: Estimator
    true_lambda: float
    mean_estimate: float
    abias: float
    rmse: float
    skipped: int
    bias: float
    mae: float
    replicas: int

    @property
    def model_name(self) -> str:
        return self.model.name

    @property
    def param(self) -> str:
        return self.model.param_label()


def _replica_block(args):
    case, n, q, master, estimators, start, stop = args
    sampler = case.sampler or simulate
    out = np.full((stop - start, len(estimators)), np.nan)
    for row, r in enumerate(range(start, stop)):
        series = sampler(case.spec, n, Seed(master, r))
        res = estimate_all(series, q, estimators)
        for col, est in enumerate(estimators):
            rep = res[est]
            if isinstance(rep, EstimateReport):
                out[row, col] = rep.value
    return out


def _chunks(total: int, parts: int):
    parts = max(1, min(parts, total))
    edges = np.linspace(0, total, parts + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def default_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # not on Linux
        return os.cpu_count() or 1


def simulate_estimates(config: ExperimentConfig, workers: int = 1) -> list[np.ndarray]:
    """Raw estimates, one ``replicas x estimators`` array per model (NaN = undefined)."""
    tasks, owners = [], []
    per_case = max(1, 4 * workers)
    for ci, case in enumerate(config.models):
        for a, b in _chunks(config.replicas, per_case):
            tasks.append(
                (case, config.sample_size, config.quantile, config.master_seed, config.estimators, a, b)
            )
            owners.append((ci, a, b))
    if workers <= 1:
        blocks = [_replica_block(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_replica_block, tasks))
    arrays = [np.full((config.replicas, len(config.estimators)), np.nan) for _ in config.models]
    for (ci, a, b), block in zip(owners, blocks):
        arrays[ci][a:b] = block
    return arrays


def summarize(estimates: np.ndarray, truth: float) -> tuple[float, float, float, float, int]:
    """``(mean, bias, mae, rmse, skipped)`` over the defined estimates."""
    ok = estimates[~np.isnan(estimates)]
    skipped = int(estimates.size - ok.size)
    if ok.size == 0:
        return math.nan, math.nan, math.nan, math.nan, skipped
    err = ok - truth
    mean = float(np.sum(ok) / ok.size)
    return mean, mean - truth, float(np.sum(np.abs(err)) / ok.size), float(np.sqrt(np.sum(err * err) / ok.size)), skipped


def run_experiment(config: ExperimentConfig, workers: int = 1, strict: bool = True) -> list[ExperimentResult]:
    """Simulate every model ``replicas`` times and aggregate per estimator.

    With ``strict`` a cell whose replicas were all undefined raises
    EmptyCell; the exception carries the full result list as ``results``.
    """
    arrays = simulate_estimates(config, workers)
    results, empty = [], []
    for case, arr in zip(config.models, arrays):
        truth = case.true_lambda
        for col, est in enumerate(config.estimators):
            mean, bias, mae, rmse, skipped = summarize(arr[:, col], truth)
            abias = mae if config.abias == "mae" else abs(bias)
            res = ExperimentResult(
                case.spec, est, truth, mean, abias, rmse, skipped, bias, mae, config.replicas
            )
            results.append(res)
            if skipped == config.replicas:
                empty.append(res)
    if strict and empty:
        cells = ", ".join(f"{r.model_name}({r.param})/{r.estimator.value}" for r in empty)
        exc = EmptyCell(f"every replica undefined in: {cells}")
        exc.results = results
        exc.cells = empty
        raise exc
    return results


# --- CSV output ---------------------------------------------------------------

RESULT_COLUMNS = ("model", "param", "estimator", "true_lambda", "mean_estimate", "abias", "rmse", "skipped")
COMPARISON_COLUMNS = RESULT_COLUMNS + ("paper_abias", "paper_rmse", "abs_diff_abias", "abs_diff_rmse", "tolerance", "passed")


def _num(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return format(float(x), ".10g")


def _stamp(kind: str) -> str:
    now = _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()
    return f"# tailsmooth {__version__} {kind} generated {now}\n"


def _result_fields(r: ExperimentResult) -> list[str]:
    return [
        r.model_name,
        r.param,
        r.estimator.value,
        _num(r.true_lambda),
        _num(r.mean_estimate),
        _num(r.abias),
        _num(r.rmse),
        str(r.skipped),
    ]


def format_results_csv(results: Sequence[ExperimentResult], stamp: bool = True) -> str:
    buf = io.StringIO()
    if stamp:
        buf.write(_stamp("results"))
    buf.write(",".join(RESULT_COLUMNS) + "\n")
    for r in results:
        buf.write(",".join(_result_fields(r)) + "\n")
    return buf.getvalue()


# --- Table 1 --------------------------------------------------------------------

# (model, parameter) -> {estimator: (abias, rmse)}, as printed in the source table
REFERENCE_TABLE1 = {
    ("mar1", 0.25): {"FF": (0.0559, 0.0723), "LOG": (0.0579, 0.0745), "SEC": (0.0566, 0.0724)},
    ("mar1", 0.50): {"FF": (0.0556, 0.0695), "LOG": (0.0557, 0.0680), "SEC": (0.0561, 0.0700)},
    ("mar1", 0.75): {"FF": (0.0457, 0.0550), "LOG": (0.0489, 0.0594), "SEC": (0.0456, 0.0551)},
    ("mma1", 0.25): {"FF": (0.0163, 0.0220), "LOG": (0.0198, 0.0257), "SEC": (0.0277, 0.0354)},
    ("mma1", 0.50): {"FF": (0.0453, 0.0581), "LOG": (0.0430, 0.0533), "SEC": (0.0461, 0.0587)},
    ("mma1", 0.75): {"FF": (0.0439, 0.0523), "LOG": (0.0348, 0.0440), "SEC": (0.0440, 0.0527)},
    ("yarp1", 0.25): {"FF": (0.0520, 0.0678), "LOG": (0.0531, 0.0695), "SEC": (0.0524, 0.0678)},
    ("yarp1", 0.50): {"FF": (0.0576, 0.0695), "LOG": (0.0503, 0.0623), "SEC": (0.0577, 0.0699)},
    ("yarp1", 0.75): {"FF": (0.0469, 0.0604), "LOG": (0.0485, 0.0633), "SEC": (0.0471, 0.0604)},
}

TABLE1_TOLERANCE = {"mar1": 0.02, "yarp1": 0.02, "mma1": 0.03}
TABLE1_PARAMS = (0.25, 0.50, 0.75)


def table1_models() -> list[ModelCase]:
    cases = [ModelCase(Mar1(c)) for c in TABLE1_PARAMS]
    cases += [ModelCase(Mma1(c)) for c in TABLE1_PARAMS]
    cases += [ModelCase(Yarp1(p, 1.0, 1.0)) for p in TABLE1_PARAMS]
    return cases


def table1_config(master_seed: int = 42, abias: str = "mae") -> ExperimentConfig:
    return ExperimentConfig(table1_models(), 200, 1000, 0.95, master_seed, LAMBDA_ESTIMATORS, abias)


def _param_value(spec) -> float:
    return spec.p if isinstance(spec, Yarp1) else spec.c


@dataclass(frozen=True)
class ComparisonRow:
    result: ExperimentResult
    paper_abias: float
    paper_rmse: float
    tolerance: float

    @property
    def diff_abias(self) -> float:
        return abs(self.result.abias - self.paper_abias)

    @property
    def diff_rmse(self) -> float:
        return abs(self.result.rmse - self.paper_rmse)

    @property
    def passed(self) -> bool:
        # NaN diffs fail
        return self.diff_abias <= self.tolerance and self.diff_rmse <= self.tolerance


@dataclass(frozen=True)
class Table1Report:
    results: list[ExperimentResult]
    rows: list[ComparisonRow]
    abias_mode: str

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> list[ComparisonRow]:
        return [r for r in self.rows if not r.passed]

    def results_csv(self, stamp: bool = True) -> str:
        return format_results_csv(self.results, stamp)

    def comparison_csv(self, stamp: bool = True) -> str:
        buf = io.StringIO()
        if stamp:
            buf.write(_stamp("table1 comparison"))
        buf.write(",".join(COMPARISON_COLUMNS) + "\n")
        for row in self.rows:
            fields = _result_fields(row.result) + [
                _num(row.paper_abias),
                _num(row.paper_rmse),
                _num(row.diff_abias),
                _num(row.diff_rmse),
                _num(row.tolerance),
                "true" if row.passed else "false",
            ]
            buf.write(",".join(fields) + "\n")
        buf.write(f"# abias = {'mean absolute error' if self.abias_mode == 'mae' else '|mean - truth|'}\n")
        buf.write("# tolerance: mar1 and yarp1 rows 0.02, mma1 rows 0.03\n")
        for row in self.rows:
            spec = row.result.model
            if isinstance(spec, Mma1) and spec.c != 0.5 and row.result.estimator is Estimator.FF:
                buf.write(
                    f"# [flag] mma1 {spec.param_label()}: truth {_num(row.result.true_lambda)} = min(c, 1-c); "
                    f"max(c, 1-c) = {_num(max(spec.c, 1 - spec.c))} is not the lag-one coefficient\n"
                )
        return buf.getvalue()


def compare_table1(results: Sequence[ExperimentResult], abias_mode: str = "mae") -> Table1Report:
    rows = []
    for r in results:
        key = (r.model_name, round(_param_value(r.model), 2))
        ref = REFERENCE_TABLE1[key][r.estimator.value]
        rows.append(ComparisonRow(r, ref[0], ref[1], TABLE1_TOLERANCE[r.model_name]))
    return Table1Report(list(results), rows, abias_mode)


def reproduce_table1(master_seed: int = 42, workers: int = 1, abias: str = "mae") -> Table1Report:
    """Run the 3 models x 3 parameters x 3 estimators grid and compare."""
    config = table1_config(master_seed, abias)
    return compare_table1(run_experiment(config, workers), abias)
