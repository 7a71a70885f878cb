"""Series containers, probability-integral transforms and level crossings.

Conventions used throughout the package:

* the empirical transform maps observation ``x_i`` to ``r_i / (L + 1)``
  where ``r_i = #{k : x_k <= x_i}`` (ties share the maximum rank);
* the ``q`` sample quantile of a uniformized series is its
  ``ceil(q * L)``-th smallest value;
* exceedances are counted over all ``L`` positions, upcrossings over the
  ``L - 1`` adjacent pairs.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping

import numpy as np

from . import kernels
from .errors import InvalidCDF, InvalidQuantile, InvalidSeries, SeriesFormatError

_EPS = np.finfo(np.float64).eps


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """A block of real observations ``X_n, ..., X_m``.

    ``start_index`` is the time index of the first value; ``meta`` carries
    provenance such as the generating model and its true tail coefficient.
    """

    values: np.ndarray
    start_index: int = 1
    meta: Mapping | None = field(default=None)

    def __post_init__(self):
        arr = _frozen(self.values)
        if arr.size < 2:
            raise InvalidSeries(f"series needs at least 2 values, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise InvalidSeries("series contains NaN or infinite values")
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "start_index", int(self.start_index))
        if self.meta is not None:
            object.__setattr__(self, "meta", dict(self.meta))

    def __len__(self) -> int:
        return self.values.size

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.start_index, self.start_index + len(self))

    @property
    def true_lambda(self) -> float | None:
        if self.meta is None:
            return None
        return self.meta.get("true_lambda")


class UniformSource(str, Enum):
    THEORETICAL = "theoretical"
    EMPIRICAL = "empirical"


@dataclass(frozen=True, eq=False)
class UniformSeries:
    """Values ``F_i(X_i)`` strictly inside (0, 1)."""

    values: np.ndarray
    source: UniformSource = UniformSource.EMPIRICAL

    def __post_init__(self):
        arr = _frozen(self.values)
        if arr.size < 2:
            raise InvalidSeries(f"series needs at least 2 values, got {arr.size}")
        if not np.all((arr > 0.0) & (arr < 1.0)):
            raise InvalidSeries("uniformized values must lie strictly inside (0, 1)")
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "source", UniformSource(self.source))

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class Level:
    """A threshold ``u`` on the uniform scale.

    ``prob`` is the non-exceedance probability the level stands for. For a
    fixed level it equals ``u``. For a sample-quantile level it is
    ``k / L`` with ``k = ceil(q L)``, the in-sample frequency of values at
    or below ``u`` (``u`` itself sits on the ``r / (L + 1)`` grid).
    """

    u: float
    origin: str = "fixed"
    q: float | None = None
    prob: float | None = None

    def __post_init__(self):
        if not (0.0 < self.u < 1.0):
            raise InvalidQuantile(f"level u must lie in (0, 1), got {self.u!r}")
        if self.origin not in ("fixed", "sample_quantile"):
            raise ValueError(f"unknown level origin {self.origin!r}")
        if self.prob is None:
            object.__setattr__(self, "prob", float(self.u))
        elif not (0.0 < self.prob < 1.0):
            raise InvalidQuantile(f"level probability must lie in (0, 1), got {self.prob!r}")

    @classmethod
    def fixed(cls, u: float) -> "Level":
        return cls(float(u))


@dataclass(frozen=True)
class CrossingCounts:
    upcrossings: int
    exceedances: int
    level: Level
    series_length: int


def _check_quantile(q: float) -> float:
    q = float(q)
    if not (0.0 < q < 1.0):
        raise InvalidQuantile(f"quantile must lie in (0, 1), got {q!r}")
    return q


def uniformize_empirical(series: TimeSeries) -> UniformSeries:
    """Rank transform ``x_i -> r_i / (L + 1)`` with max-rank ties."""
    if not isinstance(series, TimeSeries):
        series = TimeSeries(series)
    x = series.values
    ranks = np.searchsorted(np.sort(x), x, side="right")
    return UniformSeries(ranks / (x.size + 1.0), UniformSource.EMPIRICAL)


def uniformize_theoretical(
    series: TimeSeries, cdf: Callable[[np.ndarray, np.ndarray], np.ndarray]
) -> UniformSeries:
    """Apply known marginals: position ``i`` maps to ``cdf(i, X_i)``.

    ``cdf`` is called once with the vector of time indices and the vector of
    values. Results are clamped to ``[eps, 1 - eps]``.
    """
    if not isinstance(series, TimeSeries):
        series = TimeSeries(series)
    out = np.asarray(cdf(series.indices, series.values), dtype=np.float64)
    out = np.broadcast_to(out, series.values.shape)
    if np.any(np.isnan(out)) or np.any(out < 0.0) or np.any(out > 1.0):
        raise InvalidCDF("distribution function returned a value outside [0, 1]")
    return UniformSeries(np.clip(out, _EPS, 1.0 - _EPS), UniformSource.THEORETICAL)


def common_cdf(marginal: Callable[[np.ndarray], np.ndarray]):
    """Lift a single marginal d.f. to the per-index form used above."""
    return lambda _idx, x: marginal(x)


def count_crossings(useries: UniformSeries, level: Level | float) -> CrossingCounts:
    if not isinstance(level, Level):
        level = Level.fixed(level)
    up, ex, _ = kernels.crossing_stats(useries.values, level.u)
    return CrossingCounts(up, ex, level, len(useries))


def sample_quantile_level(useries: UniformSeries, q: float) -> Level:
    """Level at the ``ceil(q L)``-th smallest uniformized value."""
    q = _check_quantile(q)
    n = len(useries)
    # round() absorbs representation error such as 0.95 * 100 = 95.00000000000001
    k = min(max(math.ceil(round(q * n, 9)), 1), n)
    u = float(np.partition(useries.values, k - 1)[k - 1])
    # at k = n nothing can exceed u; keep prob strictly below 1
    prob = k / n if k < n else (n - 0.5) / n
    return Level(u, "sample_quantile", q, prob)


# --- CSV --------------------------------------------------------------------


def _read_text(source) -> tuple[str, str]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8", newline="") as fh:
            return fh.read(), str(source)
    return source.read(), getattr(source, "name", "<stream>")


def read_series_csv(source, meta: Mapping | None = None) -> TimeSeries:
    """Parse an ``index,value`` CSV into a TimeSeries.

    Indices must increase by exactly one from row to row.
    """
    text, name = _read_text(source)
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header is None:
        raise SeriesFormatError(f"{name} is empty", line=1)
    if [h.strip() for h in header] != ["index", "value"]:
        raise SeriesFormatError(f"expected header 'index,value', got {','.join(header)!r}", line=1)
    indices, values = [], []
    for lineno, row in enumerate(rows, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise SeriesFormatError(f"expected 2 fields, got {len(row)}", line=lineno)
        try:
            idx = int(row[0])
            val = float(row[1])
        except ValueError as exc:
            raise SeriesFormatError(str(exc), line=lineno) from None
        if not math.isfinite(val):
            raise SeriesFormatError(f"non-finite value {row[1]!r}", line=lineno)
        if indices and idx != indices[-1] + 1:
            kind = "non-monotone" if idx <= indices[-1] else "irregular"
            raise SeriesFormatError(f"{kind} index {idx} after {indices[-1]}", line=lineno)
        indices.append(idx)
        values.append(val)
    if len(values) < 2:
        raise SeriesFormatError(f"{name} holds {len(values)} observations, need at least 2")
    return TimeSeries(np.array(values), start_index=indices[0], meta=meta)


def format_series_csv(series: TimeSeries) -> str:
    buf = io.StringIO()
    buf.write("index,value\n")
    for idx, val in zip(series.indices.tolist(), series.values.tolist()):
        buf.write(f"{idx},{val!r}\n")
    return buf.getvalue()


def write_series_csv(series: TimeSeries, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_series_csv(series))
