"""Closed-form tail and smoothness coefficients.

Time indices are 1-based throughout: column ``n`` of a weight matrix is the
``n``-th column (``weights[:, n - 1]``). A block ``(n, m)`` also needs the
boundary neighbours ``n - 1`` and ``m + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, NamedTuple, Sequence, Union

import numpy as np

from .errors import InvalidLambda, InvalidParameter, MissingPair, NoLimit

_ROUNDING = 1e-12

PairwiseLambda = Union[Callable[[int, int], float], Mapping]


@dataclass(frozen=True)
class SmoothnessValue:
    s: float
    block: tuple[int, int]

    def __post_init__(self):
        n, m = self.block
        if not n < m:
            raise ValueError(f"block needs n < m, got ({n}, {m})")
        s = float(self.s)
        if not (-_ROUNDING <= s <= 1.0 + _ROUNDING):
            raise InvalidLambda(f"smoothness {s!r} outside [0, 1]")
        object.__setattr__(self, "s", min(max(s, 0.0), 1.0))

    def __float__(self) -> float:
        return self.s


@dataclass(frozen=True, eq=False)
class SpectralWeights:
    """Column-normalised factor weights ``b[s, n] = a^alpha / sum_s a^alpha``."""

    b: np.ndarray

    def __post_init__(self):
        b = np.array(self.b, dtype=np.float64, copy=True)
        if b.ndim == 1:
            b = b.reshape(-1, 1)
        if b.ndim != 2:
            raise InvalidParameter("spectral weights must be a 2-d array")
        if np.any(b < 0) or not np.allclose(b.sum(axis=0), 1.0, rtol=0, atol=1e-9):
            raise InvalidParameter("each column of spectral weights must be a probability vector")
        b.setflags(write=False)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_factor_weights(cls, a, alpha: float = 1.0) -> "SpectralWeights":
        w = np.asarray(a, dtype=np.float64) ** alpha
        if w.ndim == 1:
            w = w.reshape(-1, 1)
        mass = w.sum(axis=0)
        if np.any(mass <= 0):
            raise InvalidParameter("every weight column needs a positive sum")
        return cls(w / mass)

    @classmethod
    def from_model(cls, spec) -> "SpectralWeights":
        return cls.from_factor_weights(spec.weights, spec.alpha)

    @property
    def n_times(self) -> int:
        return self.b.shape[1]

    def column(self, n: int) -> np.ndarray:
        if not 1 <= n <= self.n_times:
            raise IndexError(f"column {n} out of range 1..{self.n_times}")
        return self.b[:, n - 1]


def _lookup(lam: PairwiseLambda, i: int, j: int) -> float:
    try:
        value = lam[(i, j)] if isinstance(lam, Mapping) else lam(i, j)
    except (KeyError, IndexError) as exc:
        raise MissingPair(f"lambda({j}|{i}) is not available: {exc}") from None
    if value is None:
        raise MissingPair(f"lambda({j}|{i}) is not available")
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise InvalidLambda(f"lambda({j}|{i}) = {value!r} outside [0, 1]")
    return value


def smoothness_from_pairwise(lam: PairwiseLambda, n: int, m: int) -> SmoothnessValue:
    """Average of ``lambda(j|i)`` over ``n <= i <= m`` and ``j in {i-1, i+1}``.

    ``lam`` is either a callable ``lam(i, j)`` or a mapping keyed by ``(i, j)``.
    """
    terms = [_lookup(lam, i, j) for i in range(n, m + 1) for j in (i - 1, i + 1)]
    return SmoothnessValue(math.fsum(terms) / (2 * (m - n + 1)), (n, m))


def rfactor_pairwise_lambda(weights: SpectralWeights, i: int, j: int) -> float:
    """Tail dependence of columns i and j: ``2 - sum_s max(b_si, b_sj)``."""
    bi, bj = weights.column(i), weights.column(j)
    return 2.0 - math.fsum(np.maximum(bi, bj).tolist())


def rfactor_smoothness(weights: SpectralWeights, n: int, m: int) -> SmoothnessValue:
    if n - 1 < 1 or m + 1 > weights.n_times:
        raise IndexError(
            f"block ({n}, {m}) needs columns {n - 1}..{m + 1}, have 1..{weights.n_times}"
        )
    b = weights.b[:, n - 2 : m + 1]  # columns n-1 .. m+1
    left = np.maximum(b[:, :-2], b[:, 1:-1]).sum()
    right = np.maximum(b[:, 1:-1], b[:, 2:]).sum()
    return SmoothnessValue(2.0 - (left + right) / (2 * (m - n + 1)), (n, m))


def rfactor_joint_cdf(a, alpha: float, i: int, j: int) -> Callable[[float], float]:
    """Exact ``P(F_i(X_i) <= u, F_j(X_j) <= u)`` for the r-factor model.

    Evaluated factor by factor from the raw weights: ``X_i <= t_i`` and
    ``X_j <= t_j`` hold iff every ``Z_s^alpha`` stays below both
    ``t_i / a_si^alpha`` and ``t_j / a_sj^alpha``.
    """
    w = np.asarray(a, dtype=np.float64) ** alpha
    if w.ndim == 1:
        w = w.reshape(-1, 1)
    wi, wj = w[:, i - 1], w[:, j - 1]
    mi, mj = wi.sum(), wj.sum()

    def joint(u: float) -> float:
        t_i = mi / -math.log(u)
        t_j = mj / -math.log(u)
        prob = 1.0
        for ai, aj in zip(wi.tolist(), wj.tolist()):
            # P(W <= w) = exp(-1/w) for unit Frechet W; a zero weight never binds
            rate = max(ai / t_i, aj / t_j)
            prob *= math.exp(-rate)
        return prob

    return joint


def moving_maximum_weights(c: float, length: int) -> np.ndarray:
    """Factor weights of ``max(c Z_n, (1-c) Z_{n-1})``, factors ``Z_0..Z_length``."""
    a = np.zeros((length + 1, length))
    for n in range(1, length + 1):
        a[n, n - 1] = c
        a[n - 1, n - 1] = 1.0 - c
    return a


class FailureChainLaw(NamedTuple):
    """Lag-one law of the stationary short-failures state chain."""

    p0: float
    p1: float
    p10: float
    p11: float
    p01: float


def failure_chain_law(q: float) -> FailureChainLaw:
    if not (0.0 <= q < 0.5):
        raise InvalidParameter(f"q must lie in [0, 1/2), got {q!r}")
    p0 = q
    p1 = 1.0 - q
    stop = q / (1.0 - q)
    p10 = p1 * stop
    p11 = p1 * (1.0 - stop)
    p01 = p0  # a failure is always followed by a record
    return FailureChainLaw(p0, p1, p10, p11, p01)


def stopped_clock_pairwise_lambda(q: float) -> float:
    """``lambda(i+1|i) = P(Z_i = 1, Z_{i+1} = 0)``, which equals ``q``."""
    return failure_chain_law(q).p10


def stopped_clock_smoothness(q: float, n: int, m: int) -> SmoothnessValue:
    law = failure_chain_law(q)
    total = sum(2 * law.p0 for _ in range(n, m + 1))  # p_i(0) + p_{i+1}(0)
    return SmoothnessValue(total / (2 * (m - n + 1)), (n, m))


def stopped_clock_joint_cdf(q: float) -> Callable[[float], float]:
    law = failure_chain_law(q)
    return lambda u: u * u * (law.p11 + law.p01) + u * law.p10


class LimitEstimate(NamedTuple):
    value: float
    error: float
    raw: tuple


DEFAULT_GRID = tuple(1.0 - 10.0**-k for k in range(2, 9))


def numeric_lambda_limit(
    joint_tail: Callable[[float], float],
    u_grid: Sequence[float] = DEFAULT_GRID,
    tol: float = 1e-2,
) -> LimitEstimate:
    """Extrapolate ``2 - (1 - C(u, u)) / (1 - u)`` as ``u`` rises to 1.

    The last two grid points are combined by one Richardson step assuming
    an error linear in ``1 - u``; their raw spread is the error estimate.
    """
    grid = [float(u) for u in u_grid]
    if len(grid) < 2 or any(not (0.0 < u < 1.0) for u in grid):
        raise ValueError("u_grid needs at least two points inside (0, 1)")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("u_grid must be strictly increasing")
    h = [1.0 - u for u in grid]
    raw = tuple(2.0 - (1.0 - float(joint_tail(u))) / hk for u, hk in zip(grid, h))
    if not all(math.isfinite(v) for v in raw):
        raise NoLimit("joint tail produced non-finite ratios")
    spread = abs(raw[-1] - raw[-2])
    if spread > tol:
        raise NoLimit(f"ratios still moving by {spread:.3g} at u = {grid[-1]!r}")
    ratio = h[-2] / h[-1]
    value = (ratio * raw[-1] - raw[-2]) / (ratio - 1.0)
    return LimitEstimate(value, spread, raw)
