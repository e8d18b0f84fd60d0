import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from analysis.methods.convergence import converged
from errors import ShortSeriesError


def test_constant_series_at_nash():
    verdict = converged([60.0] * 100, 60.0)
    assert verdict.converged
    assert verdict.p10 == verdict.p90 == 60.0
    assert verdict.rule == "containment"


def test_constant_series_off_nash():
    assert not converged([90.0] * 100, 60.0).converged
    assert converged([90.0] * 100, 60.0, str_rule="width").converged


def test_percentiles_inside_band():
    arr_series = np.linspace(0.95, 1.05, 101)
    verdict = converged(arr_series, 1.0, int_window=101)
    assert verdict.p10 == pytest.approx(0.96)
    assert verdict.p90 == pytest.approx(1.04)
    assert verdict.converged


def test_width_rule_ignores_level():
    arr_series = np.full(100, 1.5)
    assert converged(arr_series, 1.0, str_rule="width").converged
    assert not converged(arr_series, 1.0, str_rule="containment").converged


def test_only_last_window_counts():
    list_series = [10.0] * 50 + [1.0] * 100
    assert converged(list_series, 1.0).converged


def test_short_series():
    with pytest.raises(ShortSeriesError, match="window=100"):
        converged([1.0] * 99, 1.0)


def test_bad_benchmark_and_rule():
    with pytest.raises(ValueError):
        converged([1.0] * 100, 0.0)
    with pytest.raises(ValueError):
        converged([1.0] * 100, 1.0, str_rule="median")


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.0, 10.0), min_size=100, max_size=200), st.floats(0.5, 5.0))
def test_matches_sorted_percentile_oracle(list_series, fl_nash):
    arr_tail = np.sort(np.asarray(list_series[-100:]))
    # Linear interpolation between order statistics at rank p * (n - 1)
    fl_p10 = arr_tail[9] + 0.9 * (arr_tail[10] - arr_tail[9])
    fl_p90 = arr_tail[89] + 0.1 * (arr_tail[90] - arr_tail[89])
    verdict = converged(list_series, fl_nash)
    assert verdict.p10 == pytest.approx(fl_p10, abs=1e-9)
    assert verdict.p90 == pytest.approx(fl_p90, abs=1e-9)
    bool_expected = 0.9 * fl_nash <= fl_p10 and fl_p90 <= 1.1 * fl_nash
    if abs(fl_p10 - 0.9 * fl_nash) > 1e-9 and abs(fl_p90 - 1.1 * fl_nash) > 1e-9:
        assert verdict.converged == bool_expected


def test_width_rule_scales_with_band_times_nash():
    # p90 - p10 is 0.08 and 0.16 of the benchmark
    assert converged(np.linspace(0.95, 1.05, 101), 1.0, int_window=101, str_rule="width").converged
    assert not converged(np.linspace(0.9, 1.1, 101), 1.0, int_window=101, str_rule="width").converged
    assert converged(np.linspace(1.9, 2.1, 101), 2.0, int_window=101, str_rule="width").converged
