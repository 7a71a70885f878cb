"""Seeded exact samplers for the five generating processes.

Every sampler draws its randomness from a :class:`Seed`, so identical
``(spec, length, seed)`` always give bit-identical series. Streams are
derived counter style: ``SeedSequence(master, spawn_key=(replica,))`` feeds
a PCG64 generator, hence replica ``r`` of master ``m`` is the same no matter
which process or thread asks for it.

Uniform variates are taken on the open interval (0, 1) by shifting numpy's
``[0, 1)`` grid of multiples of ``2**-53`` by half a step.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import kernels
from .errors import InsufficientWeights, InvalidParameter, SeriesFormatError
from .series import TimeSeries, _read_text

_HALF_ULP = 2.0**-54


@dataclass(frozen=True)
class Seed:
    master: int
    replica: int = 0

    def __post_init__(self):
        if not (0 <= self.master < 2**64):
            raise InvalidParameter(f"master seed must be a 64-bit unsigned integer, got {self.master}")
        if self.replica < 0:
            raise InvalidParameter(f"replica must be non-negative, got {self.replica}")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master, spawn_key=(self.replica,))
        return np.random.Generator(np.random.PCG64(ss))


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, Seed):
        return seed.generator()
    return Seed(int(seed)).generator()


def open_uniform(rng: np.random.Generator, size=None):
    return rng.random(size) + _HALF_ULP


# --- model specifications ---------------------------------------------------


def _open_unit(name, value):
    if not (0.0 < value < 1.0):
        raise InvalidParameter(f"{name} must lie in (0, 1), got {value!r}")


@dataclass(frozen=True)
class Mar1:
    """Max-autoregressive ``X_n = max(c X_{n-1}, (1 - c) Z_n)``."""

    c: float

    name = "mar1"

    def __post_init__(self):
        _open_unit("c", self.c)

    @property
    def true_lambda(self) -> float:
        return self.c

    def param_label(self) -> str:
        return f"c={self.c:g}"


@dataclass(frozen=True)
class Mma1:
    """Moving maximum ``X_n = max(c Z_n, (1 - c) Z_{n-1})``."""

    c: float

    name = "mma1"

    def __post_init__(self):
        _open_unit("c", self.c)

    @property
    def true_lambda(self) -> float:
        # lag-one pair shares Z_n with weights c and 1 - c
        return min(self.c, 1.0 - self.c)

    def param_label(self) -> str:
        return f"c={self.c:g}"


@dataclass(frozen=True)
class Yarp1:
    """Yeh-Arnold-Robertson Pareto(III) minification process."""

    p: float
    sigma: float = 1.0
    alpha: float = 1.0

    name = "yarp1"

    def __post_init__(self):
        _open_unit("p", self.p)
        if not self.sigma > 0:
            raise InvalidParameter(f"sigma must be positive, got {self.sigma!r}")
        if not self.alpha > 0:
            raise InvalidParameter(f"alpha must be positive, got {self.alpha!r}")

    @property
    def true_lambda(self) -> float:
        return self.p

    def param_label(self) -> str:
        return f"p={self.p:g}"


@dataclass(frozen=True, eq=False)
class RFactor:
    """r-factor model; ``weights[s, n]`` is ``a_{s,n+1}`` (columns are time)."""

    alpha: float
    weights: np.ndarray

    name = "rfactor"

    def __post_init__(self):
        if not self.alpha > 0:
            raise InvalidParameter(f"alpha must be positive, got {self.alpha!r}")
        w = np.array(self.weights, dtype=np.float64, copy=True)
        if w.ndim == 1:
            w = w.reshape(1, -1)
        if w.ndim != 2 or w.size == 0:
            raise InvalidParameter("weights must be a non-empty r x T matrix")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InvalidParameter("weights must be finite and non-negative")
        if np.any(w.sum(axis=0) <= 0):
            bad = int(np.flatnonzero(w.sum(axis=0) <= 0)[0]) + 1
            raise InvalidParameter(f"weight column {bad} sums to zero")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n_factors(self) -> int:
        return self.weights.shape[0]

    @property
    def n_times(self) -> int:
        return self.weights.shape[1]

    @property
    def true_lambda(self) -> None:
        return None

    def column_mass(self) -> np.ndarray:
        """``sum_s a_{s,n}^alpha`` for every column."""
        return np.sum(self.weights**self.alpha, axis=0)

    def param_label(self) -> str:
        return f"alpha={self.alpha:g};r={self.n_factors};T={self.n_times}"


@dataclass(frozen=True)
class StoppedClock:
    """Short-failures stopped clock with stationary stop probability ``q``."""

    q: float

    name = "stopped_clock"

    def __post_init__(self):
        if not (0.0 <= self.q < 0.5):
            raise InvalidParameter(f"q must lie in [0, 1/2), got {self.q!r}")

    @property
    def true_lambda(self) -> float:
        return self.q

    def param_label(self) -> str:
        return f"q={self.q:g}"


ModelSpec = Union[Mar1, Mma1, Yarp1, RFactor, StoppedClock]
MODEL_NAMES = ("mar1", "mma1", "yarp1", "rfactor", "stopped_clock")


def model_from_params(name: str, **params) -> ModelSpec:
    """Build a spec from loose keyword parameters (CLI / config file)."""
    params = {k: v for k, v in params.items() if v is not None}
    try:
        if name == "mar1":
            return Mar1(float(params["c"]))
        if name == "mma1":
            return Mma1(float(params["c"]))
        if name == "yarp1":
            return Yarp1(
                float(params["p"]),
                float(params.get("sigma") or 1.0),
                float(params.get("alpha") or 1.0),
            )
        if name == "stopped_clock":
            return StoppedClock(float(params["q"]))
        if name == "rfactor":
            weights = params.get("weights")
            if weights is None:
                weights = read_weights_csv(params["weights_file"])
            return RFactor(float(params.get("alpha") or 1.0), weights)
    except KeyError as exc:
        key = exc.args[0]
        raise InvalidParameter(f"model {name} requires parameter {key}") from None
    raise InvalidParameter(f"unknown model {name!r}; expected one of {', '.join(MODEL_NAMES)}")


def read_weights_csv(source) -> np.ndarray:
    """Read a weight matrix: one CSV row per factor, one column per time."""
    text, name = _read_text(source)
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            rows.append([float(c) for c in row])
        except ValueError as exc:
            raise SeriesFormatError(str(exc), line=lineno) from None
        if len(rows[-1]) != len(rows[0]):
            raise SeriesFormatError(f"row has {len(rows[-1])} columns, expected {len(rows[0])}", line=lineno)
    if not rows:
        raise SeriesFormatError(f"{name} holds no weights", line=1)
    return np.array(rows)


# --- marginals --------------------------------------------------------------


def unit_frechet_cdf(x):
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore"):
        return np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)


def pareto3_cdf(x, sigma=1.0, alpha=1.0):
    x = np.asarray(x, dtype=np.float64)
    t = (np.maximum(x, 0.0) / sigma) ** alpha
    return np.where(x > 0, t / (1.0 + t), 0.0)


def marginal_cdf(spec: ModelSpec):
    """Per-index marginal d.f. ``cdf(indices, values)`` for a spec."""
    if isinstance(spec, (Mar1, Mma1, StoppedClock)):
        return lambda _idx, x: unit_frechet_cdf(x)
    if isinstance(spec, Yarp1):
        return lambda _idx, x: pareto3_cdf(x, spec.sigma, spec.alpha)
    if isinstance(spec, RFactor):
        mass = spec.column_mass()

        def cdf(idx, x):
            m = mass[np.asarray(idx) - 1]
            x = np.asarray(x, dtype=np.float64)
            return np.where(x > 0, np.exp(-m / np.where(x > 0, x, 1.0)), 0.0)

        return cdf
    raise TypeError(f"not a model spec: {spec!r}")


# --- samplers ---------------------------------------------------------------


def frechet_from_uniform(u):
    """Inverse transform of the unit Frechet d.f. ``exp(-1/x)``."""
    return -1.0 / np.log(u)


def sample_unit_frechet(rng, size=None):
    return frechet_from_uniform(open_uniform(_rng(rng), size))


def pareto3_from_uniform(v, sigma=1.0, alpha=1.0):
    return sigma * (v / (1.0 - v)) ** (1.0 / alpha)


def _check_length(length):
    if int(length) != length or length < 2:
        raise InvalidParameter(f"length must be an integer >= 2, got {length!r}")
    return int(length)


def _meta(spec, seed, **extra):
    meta = {"model": spec.name, "params": spec.param_label(), "true_lambda": spec.true_lambda}
    if isinstance(seed, Seed):
        meta["seed"] = (seed.master, seed.replica)
    meta.update(extra)
    return meta


def simulate_mar1(c: float, length: int, seed) -> TimeSeries:
    spec = Mar1(c)
    n = _check_length(length)
    rng = _rng(seed)
    z = sample_unit_frechet(rng, n + 1)
    x = kernels.mar1_path(z[0], (1.0 - c) * z[1:], c)
    return TimeSeries(x, meta=_meta(spec, seed))


def mma1_from_factors(z, c: float) -> np.ndarray:
    """``X_n = max(c Z_n, (1 - c) Z_{n-1})`` for ``n = 1..len(z)-1``."""
    z = np.asarray(z, dtype=np.float64)
    return np.maximum(c * z[1:], (1.0 - c) * z[:-1])


def simulate_mma1(c: float, length: int, seed) -> TimeSeries:
    spec = Mma1(c)
    n = _check_length(length)
    z = sample_unit_frechet(_rng(seed), n + 1)
    return TimeSeries(mma1_from_factors(z, c), meta=_meta(spec, seed))


def simulate_yarp1(p: float, sigma: float, alpha: float, length: int, seed) -> TimeSeries:
    spec = Yarp1(p, sigma, alpha)
    n = _check_length(length)
    rng = _rng(seed)
    eps = pareto3_from_uniform(open_uniform(rng, n + 1), sigma, alpha)
    keep = (open_uniform(rng, n) < p).astype(np.uint8)
    x = kernels.yarp1_path(eps[0], eps[1:], keep, p ** (-1.0 / alpha))
    return TimeSeries(x, meta=_meta(spec, seed))


def simulate_rfactor(spec: RFactor, length: int, seed) -> TimeSeries:
    n = _check_length(length)
    if n > spec.n_times:
        raise InsufficientWeights(f"length {n} exceeds the {spec.n_times} weight columns")
    u = open_uniform(_rng(seed), spec.n_factors)
    z = (-np.log(u)) ** (-1.0 / spec.alpha)  # Frechet(alpha) factors
    return TimeSeries(rfactor_from_factors(spec, z, n), meta=_meta(spec, seed))


def rfactor_from_factors(spec: RFactor, z, length: int | None = None) -> np.ndarray:
    """``X_n = max_s a_{s,n}^alpha Z_s^alpha`` for given factor values ``z``."""
    n = spec.n_times if length is None else length
    w = spec.weights[:, :n] ** spec.alpha
    zs = np.asarray(z, dtype=np.float64) ** spec.alpha
    return np.max(w * zs[:, None], axis=0)


def failure_states(q: float, length: int, rng) -> np.ndarray:
    """Stationary 0/1 recording states with no two consecutive failures."""
    return kernels.failure_chain(open_uniform(_rng(rng), length), q)


def stopped_clock_path(y, z) -> np.ndarray:
    """Replicate the last recorded value wherever ``z`` is 0 (``x_1 = y_1``)."""
    y = np.ascontiguousarray(y, dtype=np.float64)
    z = np.ascontiguousarray(z, dtype=np.uint8)
    if y.shape != z.shape:
        raise ValueError("y and z must have the same length")
    return kernels.stopped_clock_path(y, z)


def simulate_stopped_clock(q: float, length: int, seed) -> TimeSeries:
    spec = StoppedClock(q)
    n = _check_length(length)
    rng = _rng(seed)
    y = sample_unit_frechet(rng, n)
    z = failure_states(q, n, rng)
    return TimeSeries(stopped_clock_path(y, z), meta=_meta(spec, seed))


def simulate(spec: ModelSpec, length: int, seed) -> TimeSeries:
    """Dispatch on the spec type."""
    if isinstance(spec, Mar1):
        return simulate_mar1(spec.c, length, seed)
    if isinstance(spec, Mma1):
        return simulate_mma1(spec.c, length, seed)
    if isinstance(spec, Yarp1):
        return simulate_yarp1(spec.p, spec.sigma, spec.alpha, length, seed)
    if isinstance(spec, RFactor):
        return simulate_rfactor(spec, length, seed)
    if isinstance(spec, StoppedClock):
        return simulate_stopped_clock(spec.q, length, seed)
    raise TypeError(f"not a model spec: {spec!r}")


def true_lambda(spec: ModelSpec) -> float | None:
    return spec.true_lambda
