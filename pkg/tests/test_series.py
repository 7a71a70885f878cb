import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tailsmooth.errors import InvalidCDF, InvalidQuantile, InvalidSeries, SeriesFormatError
from tailsmooth.models import pareto3_cdf, unit_frechet_cdf
from tailsmooth.series import (
    Level,
    TimeSeries,
    UniformSeries,
    UniformSource,
    common_cdf,
    count_crossings,
    format_series_csv,
    read_series_csv,
    sample_quantile_level,
    uniformize_empirical,
    uniformize_theoretical,
)

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
raw_series = arrays(np.float64, st.integers(2, 60), elements=finite)
# few distinct values so ties are common
tied_series = arrays(np.float64, st.integers(2, 60), elements=st.sampled_from([-1.0, 0.0, 2.5, 7.0]))


def naive_counts(v, u):
    up = sum(1 for a, b in zip(v[:-1], v[1:]) if a <= u < b)
    return up, sum(1 for a in v if a > u)


class TestTimeSeries:
    def test_rejects_short(self):
        with pytest.raises(InvalidSeries):
            TimeSeries([1.0])

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(InvalidSeries):
            TimeSeries([1.0, bad, 2.0])

    def test_values_are_read_only(self):
        s = TimeSeries([1.0, 2.0])
        with pytest.raises(ValueError):
            s.values[0] = 5.0

    def test_indices_follow_start(self):
        assert TimeSeries([3.0, 1.0, 2.0], start_index=5).indices.tolist() == [5, 6, 7]


class TestUniformizeEmpirical:
    @pytest.mark.parametrize(
        "raw, expected",
        [
            ([10, 30, 20], [1 / 4, 3 / 4, 2 / 4]),
            ([5, 5, 5], [3 / 4, 3 / 4, 3 / 4]),
            ([2, 7, 7, 1], [2 / 5, 4 / 5, 4 / 5, 1 / 5]),
        ],
    )
    def test_examples(self, raw, expected):
        out = uniformize_empirical(TimeSeries(raw))
        assert out.source is UniformSource.EMPIRICAL
        np.testing.assert_allclose(out.values, expected, rtol=0, atol=1e-15)

    def test_short_series(self):
        with pytest.raises(InvalidSeries):
            uniformize_empirical([1.0])

    @given(raw_series)
    def test_rank_invariance(self, x):
        a = uniformize_empirical(TimeSeries(x)).values
        np.testing.assert_array_equal(a, uniformize_empirical(TimeSeries(2.0 * x)).values)
        y = np.arctan(x / 1e6) * 3 + 1
        # strictly increasing in exact arithmetic; rounding may merge close floats
        if np.unique(y).size == np.unique(x).size:
            np.testing.assert_array_equal(a, uniformize_empirical(TimeSeries(y)).values)

    @given(tied_series)
    def test_ties_share_values_and_never_upcross(self, x):
        v = uniformize_empirical(TimeSeries(x)).values
        for val in np.unique(x):
            assert np.unique(v[x == val]).size == 1
        for u in np.unique(v):
            if u >= 1:
                continue
            for a, b, xa, xb in zip(v[:-1], v[1:], x[:-1], x[1:]):
                if xa == xb:
                    assert not (a <= u < b)

    @given(raw_series)
    def test_open_interval(self, x):
        v = uniformize_empirical(TimeSeries(x)).values
        assert np.all((v > 0) & (v < 1))


class TestUniformizeTheoretical:
    def test_frechet_median(self):
        out = uniformize_theoretical(TimeSeries([1 / math.log(2), 1.0]), common_cdf(unit_frechet_cdf))
        assert out.values[0] == pytest.approx(0.5, abs=1e-15)
        assert out.source is UniformSource.THEORETICAL

    def test_constant_series(self):
        out = uniformize_theoretical(TimeSeries([3.0] * 5), common_cdf(unit_frechet_cdf))
        assert np.unique(out.values).size == 1

    def test_pareto3(self):
        out = uniformize_theoretical(TimeSeries([1.0, 2.0]), common_cdf(lambda x: pareto3_cdf(x, 1.0, 1.0)))
        assert out.values[0] == pytest.approx(0.5)

    def test_clamped_away_from_bounds(self):
        out = uniformize_theoretical(TimeSeries([-1.0, 1e300]), common_cdf(unit_frechet_cdf))
        assert 0 < out.values[0] < 1e-15
        assert 1 - 1e-15 < out.values[1] < 1

    def test_per_index(self):
        cdf = lambda idx, x: np.where(idx == 1, 0.25, 0.75)
        out = uniformize_theoretical(TimeSeries([0.0, 0.0]), cdf)
        assert out.values.tolist() == [0.25, 0.75]

    @pytest.mark.parametrize("bad", [1.5, -0.1, math.nan])
    def test_invalid_cdf(self, bad):
        with pytest.raises(InvalidCDF):
            uniformize_theoretical(TimeSeries([1.0, 2.0]), lambda i, x: np.full(2, bad))


class TestCountCrossings:
    def test_example(self):
        c = count_crossings(UniformSeries([0.1, 0.96, 0.97, 0.2, 0.99]), 0.95)
        assert (c.upcrossings, c.exceedances, c.series_length) == (2, 3, 5)
        assert c.level.u == 0.95

    def test_all_below(self):
        c = count_crossings(UniformSeries([0.1, 0.2, 0.3]), Level.fixed(0.95))
        assert (c.upcrossings, c.exceedances) == (0, 0)

    def test_all_above(self):
        c = count_crossings(UniformSeries([0.96, 0.99, 0.97, 0.98]), 0.95)
        assert (c.upcrossings, c.exceedances) == (0, 4)

    def test_matches_naive_loop(self, rng):
        for _ in range(1000):
            n = int(rng.integers(2, 40))
            v = rng.integers(1, 10, n) / 10.0
            u = float(rng.choice([0.15, 0.5, 0.85, 0.95]))
            c = count_crossings(UniformSeries(v), u)
            assert (c.upcrossings, c.exceedances) == naive_counts(v.tolist(), u)

    @settings(max_examples=300)
    @given(arrays(np.float64, st.integers(2, 50), elements=st.floats(0.01, 0.99)), st.floats(0.01, 0.99))
    def test_upcrossings_bounded_by_exceedances(self, v, u):
        c = count_crossings(UniformSeries(v), u)
        assert 0 <= c.upcrossings <= c.exceedances


class TestSampleQuantileLevel:
    def test_rank_grid(self):
        v = np.arange(1, 101) / 101
        lvl = sample_quantile_level(UniformSeries(v[::-1]), 0.95)
        assert lvl.u == pytest.approx(95 / 101, abs=1e-15)
        assert lvl.origin == "sample_quantile" and lvl.q == 0.95
        assert lvl.prob == pytest.approx(0.95)

    def test_median(self):
        assert sample_quantile_level(UniformSeries([0.75, 0.25, 0.5]), 0.5).u == 0.5

    def test_constant(self):
        assert sample_quantile_level(UniformSeries([0.3] * 7), 0.8).u == 0.3

    @pytest.mark.parametrize("q", [0.0, 1.0, -0.5, 2.0])
    def test_invalid_q(self, q):
        with pytest.raises(InvalidQuantile):
            sample_quantile_level(UniformSeries([0.2, 0.4]), q)

    def test_level_bounds(self):
        with pytest.raises(InvalidQuantile):
            Level.fixed(1.0)


class TestSeriesCsv:
    def test_round_trip(self, tmp_path):
        s = TimeSeries([0.1, 2.5e-300, 1e10 / 3], start_index=4)
        path = tmp_path / "s.csv"
        path.write_text(format_series_csv(s))
        back = read_series_csv(path)
        assert back.start_index == 4
        np.testing.assert_array_equal(back.values, s.values)

    def test_format(self):
        assert format_series_csv(TimeSeries([1.0, 2.0])) == "index,value\n1,1.0\n2,2.0\n"

    @pytest.mark.parametrize(
        "text, line",
        [
            ("", 1),
            ("idx,val\n1,2\n", 1),
            ("index,value\n1,2\n1,3\n", 3),
            ("index,value\n2,2\n1,3\n", 3),
            ("index,value\n1,2\n3,3\n", 3),
            ("index,value\n1,2\n2,abc\n", 3),
            ("index,value\n1,2\n2,nan\n", 3),
            ("index,value\n1,2,3\n", 2),
        ],
    )
    def test_rejects_malformed(self, text, line):
        with pytest.raises(SeriesFormatError) as err:
            read_series_csv(io.StringIO(text))
        assert err.value.line == line

    def test_too_short(self):
        with pytest.raises(SeriesFormatError):
            read_series_csv(io.StringIO("index,value\n1,2\n"))
