"""Backend selection for the inner loops.

The sequential recursions (max-autoregression, minification, failure chain,
stopped clock) come from the compiled extension when it was built and from
the pure-Python module otherwise. Set ``TAILSMOOTH_PURE=1`` to force the
fallback.

The counting kernels always use the numpy versions: they vectorize, and
numpy's SIMD comparisons beat the scalar compiled loop by about 3x at
``n = 1e5`` (see ``benchmarks/bench_kernels.py``). The compiled twins are
kept for the cross-backend tests and the benchmark.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("TAILSMOOTH_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

mar1_path = _impl.mar1_path
yarp1_path = _impl.yarp1_path
failure_chain = _impl.failure_chain
stopped_clock_path = _impl.stopped_clock_path
crossing_stats = _kernels_py.crossing_stats
tie_count = _kernels_py.tie_count


def compiled_available() -> bool:
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True
