"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Each function returns exactly what its compiled twin returns for the same
input, so the two backends are interchangeable and can be cross-checked.
"""

import numpy as np


def mar1_path(x0, innov, c):
    out = np.empty(len(innov), dtype=np.float64)
    prev = float(x0)
    for i, z in enumerate(innov.tolist()):
        a = c * prev
        prev = a if a > z else z
        out[i] = prev
    return out


def yarp1_path(x0, eps, keep, factor):
    out = np.empty(len(eps), dtype=np.float64)
    prev = float(x0)
    for i, (e, k) in enumerate(zip(eps.tolist(), keep.tolist())):
        a = factor * prev
        prev = a if (k or a < e) else e
        out[i] = prev
    return out


def failure_chain(uniforms, q):
    n = len(uniforms)
    out = np.empty(n, dtype=np.uint8)
    if n == 0:
        return out
    stop = q / (1.0 - q)
    u = uniforms.tolist()
    prev = 0 if u[0] < q else 1
    out[0] = prev
    for i in range(1, n):
        prev = 1 if prev == 0 else (0 if u[i] < stop else 1)
        out[i] = prev
    return out


def stopped_clock_path(y, z):
    n = len(y)
    out = np.empty(n, dtype=np.float64)
    if n == 0:
        return out
    ys = y.tolist()
    prev = ys[0]
    out[0] = prev
    for i, flag in enumerate(z.tolist()[1:], start=1):
        if flag:
            prev = ys[i]
        out[i] = prev
    return out


def crossing_stats(v, u):
    above = v > u
    if above.size == 0:
        return 0, 0, 0
    before, after = above[:-1], above[1:]
    up = int(np.count_nonzero(~before & after))
    below = int(np.count_nonzero(~before & ~after))
    return up, int(np.count_nonzero(above)), below


def tie_count(x):
    return int(np.count_nonzero(x[1:] == x[:-1]))
