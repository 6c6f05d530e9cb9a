"""Medians, bootstrap CIs, IQR outlier rejection and growth-shape checks."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class SampleSet:
    values: tuple
    label: tuple = ("", 0, "")  # (algorithm, n, metric)

    def __init__(self, values, label=("", 0, "")):
        object.__setattr__(self, "values", tuple(float(v) for v in values))
        object.__setattr__(self, "label", tuple(label))

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class SummaryRow:
    label: tuple
    count: int
    median: float
    ci_low: float
    ci_high: float
    outliers_removed: int
    mean: float
    failed: bool = False

    @property
    def algorithm(self) -> str:
        return self.label[0]

    @property
    def n(self) -> int:
        return self.label[1]

    @property
    def metric(self) -> str:
        return self.label[2]

    @classmethod
    def failed_cell(cls, label) -> "SummaryRow":
        nan = float("nan")
        return cls(tuple(label), 0, nan, nan, nan, 0, nan, failed=True)


def quartiles(values: Sequence[float]) -> tuple[float, float]:
    """Q1, Q3 by linear interpolation at 0.25*(k-1) and 0.75*(k-1)."""
    q1, q3 = np.percentile(np.asarray(values, dtype=float), [25, 75], method="linear")
    return float(q1), float(q3)


def iqr_filter(samples: SampleSet) -> tuple[SampleSet, int]:
    """Drop points outside ``[Q1 - 1.5*IQR, Q3 + 1.5*IQR]``.

    Applied once; fewer than four values pass through untouched.
    """
    vals = samples.values
    if len(vals) < 4:
        return samples, 0
    q1, q3 = quartiles(vals)
    spread = q3 - q1
    lo, hi = q1 - 1.5 * spread, q3 + 1.5 * spread
    kept = [v for v in vals if lo <= v <= hi]
    return SampleSet(kept, samples.label), len(vals) - len(kept)


def pct_change(new_value: float, baseline: float) -> float:
    """``100 * (new - baseline) / baseline``."""
    if baseline == 0:
        raise StatsError("percentage change against a zero baseline is undefined")
    return 100.0 * (new_value - baseline) / baseline


def median_ci(samples: SampleSet, confidence: float = 0.95, resamples: int = 10000,
              seed: int = 0, outliers_removed: int = 0) -> SummaryRow:
    """Median with a seeded bootstrap-percentile confidence interval.

    A single value or an all-equal sample gives a zero-width interval.
    """
    vals = np.asarray(samples.values, dtype=float)
    if vals.size == 0:
        raise StatsError("no values to summarize")
    if not 0 < confidence < 1:
        raise StatsError("confidence must lie in (0, 1)")
    med = float(np.median(vals))
    if vals.size == 1 or np.all(vals == vals[0]):
        lo = hi = med
    else:
        rng = np.random.default_rng(seed)
        idx = rng.integers(0, vals.size, size=(resamples, vals.size))
        boot = np.median(vals[idx], axis=1)
        alpha = (1 - confidence) / 2
        lo, hi = np.quantile(boot, [alpha, 1 - alpha])
        # the percentile interval of a median can exclude the point estimate
        lo, hi = min(float(lo), med), max(float(hi), med)
    return SummaryRow(
        label=samples.label,
        count=int(vals.size) + outliers_removed,
        median=med,
        ci_low=float(lo),
        ci_high=float(hi),
        outliers_removed=outliers_removed,
        mean=float(vals.mean()),
    )


def summarize(samples: SampleSet, seed: int = 0, confidence: float = 0.95,
              resamples: int = 10000) -> SummaryRow:
    kept, removed = iqr_filter(samples)
    return median_ci(kept, confidence, resamples, seed, outliers_removed=removed)


def _lg(x):
    return math.log2(x)


class GrowthForm(str, enum.Enum):
    LINEAR = "linear"
    NLOGN = "nlogn"
    NLOGLOG_RATIO = "nloglog_ratio"
    NLOG_RATIO = "nlog_ratio"

    def __call__(self, n: float) -> float:
        if n < 16:
            raise StatsError(f"growth form {self.value} needs n >= 16, got {n}")
        if self is GrowthForm.LINEAR:
            return float(n)
        if self is GrowthForm.NLOGN:
            return n * _lg(n)
        if self is GrowthForm.NLOGLOG_RATIO:
            return n * _lg(_lg(n)) / _lg(_lg(_lg(n)))
        return n * _lg(n) / _lg(_lg(n))


@dataclass(frozen=True)
class FlatnessResult:
    passed: bool
    ratios: tuple
    deviation: float
    tolerance: float


def flatness_check(n_values: Sequence[float], medians: Sequence[float], form: GrowthForm,
                   tolerance: float = 0.25) -> FlatnessResult:
    """Is ``median / form(n)`` constant to within ``tolerance`` of its last value?"""
    form = GrowthForm(form)
    if len(n_values) != len(medians):
        raise StatsError("n_values and medians differ in length")
    if len(n_values) < 3:
        raise StatsError("need at least three grid points")
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise StatsError("n_values must be strictly increasing")
    ratios = [m / form(n) for n, m in zip(n_values, medians)]
    last = ratios[-1]
    if last == 0:
        raise StatsError("last ratio is zero")
    dev = max(abs(r / last - 1) for r in ratios)
    return FlatnessResult(dev <= tolerance, tuple(ratios), dev, tolerance)


def ratio_of_medians(num: Sequence[float], den: Sequence[float]) -> Optional[float]:
    d = float(np.median(den))
    return None if d == 0 else float(np.median(num)) / d
