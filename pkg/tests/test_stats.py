import numpy as np
import pytest
from hypothesis import given, strategies as st

from backoffsim.stats import (
    GrowthForm,
    SampleSet,
    StatsError,
    flatness_check,
    iqr_filter,
    median_ci,
    pct_change,
    quartiles,
    summarize,
)

import oracles

finite = st.floats(-1e6, 1e6, allow_nan=False)


def test_iqr_example():
    kept, removed = iqr_filter(SampleSet([1, 2, 3, 4, 100]))
    assert oracles.quartiles_linear([1, 2, 3, 4, 100]) == (2, 4)
    assert kept.values == (1, 2, 3, 4)
    assert removed == 1


def test_iqr_constant():
    kept, removed = iqr_filter(SampleSet([5, 5, 5, 5]))
    assert kept.values == (5, 5, 5, 5) and removed == 0


def test_iqr_small_sample_untouched():
    kept, removed = iqr_filter(SampleSet([1, 1000, 10**6]))
    assert removed == 0 and len(kept) == 3


@given(st.lists(finite, min_size=4, max_size=60))
def test_quartiles_match_hand_rule(values):
    q1, q3 = quartiles(values)
    e1, e3 = oracles.quartiles_linear(values)
    assert q1 == pytest.approx(e1, abs=1e-6) and q3 == pytest.approx(e3, abs=1e-6)


@given(st.lists(st.integers(-10**6, 10**6), min_size=4, max_size=60))
def test_iqr_keeps_exactly_the_fenced_points(values):
    kept, removed = iqr_filter(SampleSet(values))
    q1, q3 = oracles.quartiles_linear(values)
    d = q3 - q1
    inside = [v for v in values if q1 - 1.5 * d <= v <= q3 + 1.5 * d]
    assert list(kept.values) == inside
    assert removed == len(values) - len(inside) < len(values)


def test_iqr_vacuous():
    vals = [10, 11, 12, 13, 14, 15]
    kept, removed = iqr_filter(SampleSet(vals))
    assert removed == 0 and kept.values == tuple(vals)


@pytest.mark.parametrize("new, base, expected", [
    (150, 100, 50.0), (100, 100, 0.0), (53.8, 64.5, -16.589147), (120, 100, 20.0),
])
def test_pct_change(new, base, expected):
    assert pct_change(new, base) == pytest.approx(expected, abs=1e-6)


def test_pct_change_not_antisymmetric():
    assert pct_change(150, 100) == 50
    assert pct_change(100, 150) == pytest.approx(-100 / 3)


def test_pct_change_zero_baseline():
    with pytest.raises(StatsError):
        pct_change(1, 0)


def test_median_ci_constant():
    row = median_ci(SampleSet([7] * 5))
    assert (row.median, row.ci_low, row.ci_high) == (7, 7, 7)


def test_median_ci_odd_even():
    assert median_ci(SampleSet(range(1, 102)), resamples=500).median == 51
    assert median_ci(SampleSet([1, 2, 3, 4]), resamples=500).median == 2.5


def test_median_ci_single_value():
    row = median_ci(SampleSet([3]))
    assert (row.count, row.median, row.ci_low, row.ci_high) == (1, 3, 3, 3)


def test_median_ci_empty():
    with pytest.raises(StatsError):
        median_ci(SampleSet([]))


def test_median_ci_deterministic_and_sane():
    rng = np.random.default_rng(0)
    vals = rng.normal(100, 10, size=200)
    a = median_ci(SampleSet(vals), seed=5)
    b = median_ci(SampleSet(vals), seed=5)
    assert a == b
    assert a.ci_low <= a.median <= a.ci_high
    # normal approximation to the median's standard error: 1.2533 sigma / sqrt(n)
    half = 1.96 * 1.2533 * 10 / np.sqrt(200)
    assert a.ci_high - a.ci_low == pytest.approx(2 * half, rel=0.35)


@given(st.lists(st.integers(0, 1000), min_size=2, max_size=40), st.integers(0, 2**32))
def test_summary_invariants(values, seed):
    row = summarize(SampleSet(values), seed=seed, resamples=200)
    assert row.ci_low <= row.median <= row.ci_high
    assert row.outliers_removed < row.count == len(values)


def test_flatness_examples():
    grid = [2**10, 2**12, 2**14]
    r = flatness_check(grid, [3 * n for n in grid], GrowthForm.LINEAR, 0.01)
    assert r.passed and all(x == pytest.approx(3) for x in r.ratios)
    r = flatness_check(grid, [n * np.log2(n) for n in grid], GrowthForm.LINEAR, 0.1)
    assert not r.passed


@given(st.floats(1e-3, 1e3))
def test_flatness_scale_invariant(k):
    grid = [100, 1000, 10000, 100000]
    meds = [n * (1 + 0.1 * i) for i, n in enumerate(grid)]
    base = flatness_check(grid, meds, GrowthForm.LINEAR, 0.25)
    scaled = flatness_check(grid, [k * m for m in meds], GrowthForm.LINEAR, 0.25)
    assert base.passed == scaled.passed
    assert base.deviation == pytest.approx(scaled.deviation)


@pytest.mark.parametrize("grid", [[8, 100, 1000], [100, 1000], [1000, 100, 10000]])
def test_flatness_rejects(grid):
    with pytest.raises(StatsError):
        flatness_check(grid, [1.0] * len(grid), GrowthForm.LINEAR)


def test_growth_forms():
    n = 2**16
    assert GrowthForm.LINEAR(n) == n
    assert GrowthForm.NLOGN(n) == n * 16
    assert GrowthForm.NLOG_RATIO(n) == n * 16 / 4
    assert GrowthForm.NLOGLOG_RATIO(n) == n * 4 / 2
