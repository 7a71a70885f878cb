"""The compiled and pure-Python kernels must agree exactly."""

import numpy as np
import pytest

from tailsmooth import _kernels_py, kernels

compiled = pytest.importorskip("tailsmooth._kernels")


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")
    assert kernels.compiled_available()


@pytest.mark.parametrize("c", [0.1, 0.5, 0.9])
def test_mar1_path(rng, c):
    innov = (1 - c) * -1 / np.log(rng.random(5000) + 2.0**-54)
    np.testing.assert_array_equal(compiled.mar1_path(2.0, innov, c), _kernels_py.mar1_path(2.0, innov, c))


def test_mar1_single_step():
    assert compiled.mar1_path(4.0, np.array([0.5]), 0.5).tolist() == [2.0]
    assert _kernels_py.mar1_path(4.0, np.array([0.5]), 0.5).tolist() == [2.0]


def test_yarp1_path(rng):
    eps = rng.random(5000) * 10
    keep = (rng.random(5000) < 0.4).astype(np.uint8)
    a = compiled.yarp1_path(1.5, eps, keep, 1.7)
    b = _kernels_py.yarp1_path(1.5, eps, keep, 1.7)
    np.testing.assert_array_equal(a, b)


def test_yarp1_keep_means_scaled_previous():
    out = compiled.yarp1_path(3.0, np.array([0.1, 0.1]), np.array([1, 1], dtype=np.uint8), 2.0)
    assert out.tolist() == [6.0, 12.0]


@pytest.mark.parametrize("q", [0.0, 0.2, 0.49])
def test_failure_chain(rng, q):
    u = rng.random(5000) + 2.0**-54
    np.testing.assert_array_equal(compiled.failure_chain(u, q), _kernels_py.failure_chain(u, q))


def test_stopped_clock_path(rng):
    y = rng.random(1000)
    z = _kernels_py.failure_chain(rng.random(1000) + 2.0**-54, 0.3)
    np.testing.assert_array_equal(compiled.stopped_clock_path(y, z), _kernels_py.stopped_clock_path(y, z))


@pytest.mark.parametrize("u", [0.05, 0.5, 0.95])
def test_crossing_stats(rng, u):
    for _ in range(50):
        v = rng.integers(1, 20, int(rng.integers(1, 60))) / 20.0
        assert compiled.crossing_stats(v, u) == _kernels_py.crossing_stats(v, u)


def test_tie_count(rng):
    x = np.round(rng.random(2000), 1)
    assert compiled.tie_count(x) == _kernels_py.tie_count(x)


def test_empty_inputs():
    empty = np.empty(0)
    assert compiled.crossing_stats(empty, 0.5) == _kernels_py.crossing_stats(empty, 0.5) == (0, 0, 0)
    assert compiled.failure_chain(empty, 0.2).size == 0
