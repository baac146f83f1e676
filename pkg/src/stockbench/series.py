"""Daily close series, summary statistics, autocorrelation and splitting."""
from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyPartitionError,
    InvalidSeriesError,
    LagOutOfRangeError,
    ZeroVarianceError,
)


def to_day(value) -> np.datetime64:
    """Coerce a date-like (``date``, ISO string, ``datetime64``) to ``datetime64[D]``."""
    if isinstance(value, dt.datetime):
        value = value.date()
    return np.datetime64(value, "D")


@dataclass(frozen=True)
class PriceSeries:
    """Ordered daily closes for one ticker.

    ``dates`` is a ``datetime64[D]`` array, strictly increasing; ``closes`` is
    float64, finite and positive. Both arrays are made read-only.
    """

    ticker: str
    dates: np.ndarray
    closes: np.ndarray

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]").copy()
        closes = np.asarray(self.closes, dtype=np.float64).copy()
        if dates.ndim != 1 or closes.ndim != 1 or len(dates) != len(closes):
            raise InvalidSeriesError("dates and closes must be 1-D and equally long")
        if len(dates) == 0:
            raise InvalidSeriesError("a price series needs at least one observation")
        if not np.all(np.isfinite(closes)) or np.any(closes <= 0):
            raise InvalidSeriesError(f"{self.ticker}: closes must be finite and > 0")
        if np.any(np.diff(dates) <= np.timedelta64(0, "D")):
            raise InvalidSeriesError(f"{self.ticker}: dates must be strictly increasing")
        dates.flags.writeable = False
        closes.flags.writeable = False
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "closes", closes)

    @classmethod
    def from_points(cls, ticker, points):
        """Build from an iterable of ``(date, close)`` pairs."""
        points = list(points)
        return cls(ticker, [to_day(d) for d, _ in points], [c for _, c in points])

    @property
    def points(self):
        return [(d.item(), float(c)) for d, c in zip(self.dates, self.closes)]

    def __len__(self):
        return len(self.closes)

    def scaled(self, factor):
        return PriceSeries(self.ticker, self.dates, self.closes * factor)


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    min: float
    max: float
    sd: float
    count: int


@dataclass(frozen=True)
class SplitSeries:
    train: PriceSeries
    test: PriceSeries

    @property
    def ticker(self):
        return self.train.ticker


@dataclass(frozen=True)
class LagPairs:
    """``(y_t, y_{t+k})`` pairs, stored column-wise."""

    lag: int
    y_t: np.ndarray
    y_t_plus_k: np.ndarray

    @property
    def pairs(self):
        return list(zip(self.y_t.tolist(), self.y_t_plus_k.tolist()))

    def __len__(self):
        return len(self.y_t)


def _sum(x) -> float:
    """Plain left-to-right sum, independent of numpy's pairwise blocking."""
    return float(np.cumsum(x)[-1])


def summary_stats(series: PriceSeries) -> SummaryStats:
    """Mean, extrema, population SD (denominator T) and count of the closes."""
    y = series.closes
    lo, hi = float(y.min()), float(y.max())
    if lo == hi:
        return SummaryStats(lo, lo, hi, 0.0, len(y))
    mean = _sum(y) / len(y)
    sd = float(np.sqrt(_sum((y - mean) ** 2) / len(y)))
    # rounding cannot be allowed to push the mean outside [min, max]
    return SummaryStats(min(max(mean, lo), hi), lo, hi, sd, len(y))


def autocorrelation(series: PriceSeries, k: int) -> float:
    """Lag-``k`` autocorrelation, normalised by the full-sample variance.

    r_k = sum_{t>k} (y_t - ybar)(y_{t-k} - ybar) / (T s^2), with s^2 the
    population variance. The denominator is evaluated as the sum of squared
    deviations, with the same left-to-right summation as the numerator, which
    makes ``r_0`` exactly 1.
    """
    y = series.closes
    n = len(y)
    if not 0 <= k < n:
        raise LagOutOfRangeError(f"lag {k} outside [0, {n})")
    if y.min() == y.max():
        raise ZeroVarianceError(f"{series.ticker}: constant series has no autocorrelation")
    d = y - _sum(y) / n
    denom = _sum(d * d)
    num = _sum(d[k:] * d[: n - k])
    return num / denom


def lag_pairs(series: PriceSeries, k: int) -> LagPairs:
    y = series.closes
    if not 1 <= k < len(y):
        raise LagOutOfRangeError(f"lag {k} outside [1, {len(y)})")
    return LagPairs(k, y[:-k].copy(), y[k:].copy())


def split_at(series: PriceSeries, boundary) -> SplitSeries:
    """Split into dates before ``boundary`` (train) and on/after it (test)."""
    cut = int(np.searchsorted(series.dates, to_day(boundary), side="left"))
    if cut == 0 or cut == len(series):
        raise EmptyPartitionError(
            f"{series.ticker}: boundary {boundary} leaves an empty "
            f"{'training' if cut == 0 else 'test'} partition"
        )
    return SplitSeries(
        PriceSeries(series.ticker, series.dates[:cut], series.closes[:cut]),
        PriceSeries(series.ticker, series.dates[cut:], series.closes[cut:]),
    )


def concat(split: SplitSeries) -> PriceSeries:
    """Inverse of :func:`split_at`."""
    return PriceSeries(
        split.train.ticker,
        np.concatenate([split.train.dates, split.test.dates]),
        np.concatenate([split.train.closes, split.test.closes]),
    )


def write_lag_pairs_csv(pairs: LagPairs, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["y_t", "y_t_plus_k"])
        for a, b in zip(pairs.y_t, pairs.y_t_plus_k):
            writer.writerow([f"{a:.6f}", f"{b:.6f}"])
