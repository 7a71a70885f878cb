"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--n 100000] [--repeat 5]

Each kernel is timed on identical inputs with both backends, outputs are
checked for exact equality, and a scaled-down Table 1 run is timed end to
end under each backend (the backend is chosen at import, so that part runs
in subprocesses).
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from tailsmooth import _kernels_py
from tailsmooth.kernels import compiled_available


def kernel_cases(n, rng):
    innov = 0.5 * -1.0 / np.log(rng.random(n) + 2.0**-54)
    eps = rng.random(n) / (1 - rng.random(n))
    keep = (rng.random(n) < 0.5).astype(np.uint8)
    uni = rng.random(n) + 2.0**-54
    z = _kernels_py.failure_chain(uni, 0.3)
    v = (np.argsort(np.argsort(rng.random(n))) + 1) / (n + 1.0)
    ties = np.round(rng.random(n), 2)
    return {
        "mar1_path": (1.0, innov, 0.5),
        "yarp1_path": (1.0, eps, keep, 2.0),
        "failure_chain": (uni, 0.3),
        "stopped_clock_path": (innov, z),
        "crossing_stats": (v, 0.95),
        "tie_count": (ties,),
    }


def bench_kernels(n, repeat):
    from tailsmooth import _kernels

    rng = np.random.default_rng(0)
    print(f"kernel timings, n = {n}, best of {repeat}")
    print(f"{'kernel':<20}{'python (ms)':>14}{'cython (ms)':>14}{'speedup':>10}  equal")
    for name, args in kernel_cases(n, rng).items():
        py, cy = getattr(_kernels_py, name), getattr(_kernels, name)
        t_py = min(timeit.repeat(lambda: py(*args), number=1, repeat=repeat))
        t_cy = min(timeit.repeat(lambda: cy(*args), number=1, repeat=repeat))
        a, b = py(*args), cy(*args)
        same = np.array_equal(a, b) if isinstance(a, np.ndarray) else a == b
        print(f"{name:<20}{1e3 * t_py:>14.3f}{1e3 * t_cy:>14.3f}{t_py / t_cy:>10.1f}  {same}")


SNIPPET = """
import time
from tailsmooth import kernels
from tailsmooth.montecarlo import ExperimentConfig, run_experiment, table1_models
cfg = ExperimentConfig(table1_models(), replicas={replicas}, sample_size=1000)
t = time.perf_counter()
run_experiment(cfg, workers=1)
print(kernels.BACKEND, time.perf_counter() - t)
"""


def bench_end_to_end(replicas):
    print(f"\nTable 1 grid, {replicas} replicas per cell, 1 worker")
    for pure in ("1", "0"):
        env = dict(os.environ, TAILSMOOTH_PURE=pure)
        out = subprocess.run(
            [sys.executable, "-c", SNIPPET.format(replicas=replicas)],
            env=env, capture_output=True, text=True, check=True,
        ).stdout.split()
        print(f"  {out[0]:<8} {float(out[1]):8.2f} s")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--replicas", type=int, default=50)
    args = ap.parse_args()
    if not compiled_available():
        sys.exit("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")
    bench_kernels(args.n, args.repeat)
    bench_end_to_end(args.replicas)


if __name__ == "__main__":
    main()
