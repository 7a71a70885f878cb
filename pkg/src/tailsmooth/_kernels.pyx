# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Semantics must match ``_kernels_py`` bit for bit."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def mar1_path(double x0, const double[::1] innov, double c):
    cdef Py_ssize_t n = innov.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double prev = x0, a
    for i in range(n):
        a = c * prev
        prev = a if a > innov[i] else innov[i]
        o[i] = prev
    return out


def yarp1_path(double x0, const double[::1] eps, const cnp.uint8_t[::1] keep, double factor):
    cdef Py_ssize_t n = eps.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double prev = x0, a
    for i in range(n):
        a = factor * prev
        if keep[i] or a < eps[i]:
            prev = a
        else:
            prev = eps[i]
        o[i] = prev
    return out


def failure_chain(const double[::1] uniforms, double q):
    cdef Py_ssize_t n = uniforms.shape[0], i
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out = np.empty(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] z = out
    cdef double stop = q / (1.0 - q)
    if n == 0:
        return out
    z[0] = 0 if uniforms[0] < q else 1
    for i in range(1, n):
        if z[i - 1] == 0:
            z[i] = 1
        else:
            z[i] = 0 if uniforms[i] < stop else 1
    return out


def stopped_clock_path(const double[::1] y, const cnp.uint8_t[::1] z):
    cdef Py_ssize_t n = y.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    if n == 0:
        return out
    o[0] = y[0]
    for i in range(1, n):
        o[i] = o[i - 1] if z[i] == 0 else y[i]
    return out


def crossing_stats(const double[::1] v, double u):
    """Return (upcrossings, exceedances, adjacent pairs both at or below u)."""
    cdef Py_ssize_t n = v.shape[0], i
    cdef long long up = 0, ex = 0, below = 0
    cdef int cur, nxt
    cdef const double* p
    if n == 0:
        return 0, 0, 0
    p = &v[0]
    cur = p[0] > u
    ex = cur
    for i in range(1, n):
        nxt = p[i] > u
        ex += nxt
        up += nxt & (1 - cur)
        below += (1 - nxt) & (1 - cur)
        cur = nxt
    return int(up), int(ex), int(below)


def tie_count(const double[::1] x):
    cdef Py_ssize_t n = x.shape[0], i
    cdef long long ties = 0
    for i in range(1, n):
        ties += x[i] == x[i - 1]
    return int(ties)
