"""Smoothness and tail dependence coefficients of time series.

Closed forms, exact samplers for max-autoregressive, moving-maximum,
Pareto minification, r-factor and stopped-clock processes, three lag-one
tail dependence estimators and a Monte Carlo harness around them.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateCopula,
    EmptyCell,
    InsufficientWeights,
    InvalidCDF,
    InvalidLambda,
    InvalidParameter,
    InvalidQuantile,
    InvalidSeries,
    MissingPair,
    NoExceedances,
    NoLimit,
    SeriesFormatError,
    TailSmoothError,
)
from .estimators import (  # noqa: E402
    EstimateReport,
    Estimator,
    empirical_copula_diag,
    estimate_all,
    lambda_ff,
    lambda_log,
    lambda_sec,
    tie_rate,
)
from .kernels import BACKEND  # noqa: E402
from .models import (  # noqa: E402
    Mar1,
    Mma1,
    RFactor,
    Seed,
    StoppedClock,
    Yarp1,
    simulate,
)
from .series import (  # noqa: E402
    CrossingCounts,
    Level,
    TimeSeries,
    UniformSeries,
    count_crossings,
    sample_quantile_level,
    uniformize_empirical,
    uniformize_theoretical,
)
