"""Synthetic stand-in OHLCV files on the NYSE trading calendar.

The generated prices are geometric random walks with a calmer regime before
2020 and a faster, more volatile one afterwards. They are *not* market data;
they exist so the full pipeline can run where vendor files are unavailable.
"""
from __future__ import annotations

import datetime as dt
from pathlib import Path

import numpy as np

from .ingest import RawOhlcvRow, write_ohlcv_csv
from .rng import derive_seed

# start price, (drift, vol) before 2020, (drift, vol) from 2020; annualised
PROFILES = {
    "MSFT": (46.0, (0.26, 0.25), (0.45, 0.40)),
    "AAPL": (27.0, (0.20, 0.27), (0.60, 0.45)),
    "TSLA": (44.0, (0.05, 0.45), (1.60, 0.80)),
    "GOOG": (525.0, (0.18, 0.25), (0.35, 0.38)),
    "AMZN": (310.0, (0.38, 0.30), (0.45, 0.38)),
    "FB": (78.0, (0.18, 0.30), (0.30, 0.45)),
}
REGIME_CHANGE = dt.date(2020, 1, 1)
SPECIAL_CLOSURES = {dt.date(2018, 12, 5)}


def _easter(year):
    a, b, c = year % 19, year // 100, year % 100
    d, e = b // 4, b % 4
    f = (b + 8) // 25
    g = (b - f + 1) // 3
    h = (19 * a + b - d - g + 15) % 30
    i, k = c // 4, c % 4
    l_ = (32 + 2 * e + 2 * i - h - k) % 7
    m = (a + 11 * h + 22 * l_) // 451
    month = (h + l_ - 7 * m + 114) // 31
    day = (h + l_ - 7 * m + 114) % 31 + 1
    return dt.date(year, month, day)


def _nth_weekday(year, month, weekday, n):
    first = dt.date(year, month, 1)
    if n > 0:
        return first + dt.timedelta(days=(weekday - first.weekday()) % 7 + 7 * (n - 1))
    nxt = dt.date(year + month // 12, month % 12 + 1, 1)
    last = nxt - dt.timedelta(days=1)
    return last - dt.timedelta(days=(last.weekday() - weekday) % 7)


def _observed(day):
    if day.weekday() == 5:
        return day - dt.timedelta(days=1)
    if day.weekday() == 6:
        return day + dt.timedelta(days=1)
    return day


def nyse_holidays(year):
    days = {
        _observed(dt.date(year, 1, 1)),
        _nth_weekday(year, 1, 0, 3),
        _nth_weekday(year, 2, 0, 3),
        _easter(year) - dt.timedelta(days=2),
        _nth_weekday(year, 5, 0, -1),
        _observed(dt.date(year, 7, 4)),
        _nth_weekday(year, 9, 0, 1),
        _nth_weekday(year, 11, 3, 4),
        _observed(dt.date(year, 12, 25)),
    }
    if year >= 2022:
        days.add(_observed(dt.date(year, 6, 19)))
    # a Saturday New Year is not observed on the preceding Friday
    return {d for d in days if d.year == year}


def nyse_trading_days(start, end):
    start, end = dt.date.fromisoformat(str(start)), dt.date.fromisoformat(str(end))
    closed = set(SPECIAL_CLOSURES)
    for year in range(start.year, end.year + 1):
        closed |= nyse_holidays(year)
    day, out = start, []
    while day <= end:
        if day.weekday() < 5 and day not in closed:
            out.append(day)
        day += dt.timedelta(days=1)
    return out


def standin_rows(ticker, start="2015-01-01", end="2021-04-30", seed=2021):
    start_price, before, after = PROFILES[ticker]
    days = nyse_trading_days(start, end)
    rng = np.random.default_rng(derive_seed(seed, "standin", ticker))
    dt_year = 1.0 / 252
    rows = []
    close = start_price
    for day in days:
        drift, vol = before if day < REGIME_CHANGE else after
        prev = close
        close = prev * np.exp((drift - 0.5 * vol ** 2) * dt_year + vol * np.sqrt(dt_year) * rng.standard_normal())
        open_ = prev * np.exp(0.25 * vol * np.sqrt(dt_year) * rng.standard_normal())
        wiggle = np.abs(rng.standard_normal(2)) * 0.3 * vol * np.sqrt(dt_year)
        high = max(open_, close) * (1 + wiggle[0])
        low = min(open_, close) * (1 - wiggle[1])
        volume = int(rng.integers(5_000_000, 60_000_000))
        c = round(float(close), 6)
        rows.append(RawOhlcvRow(day, round(float(open_), 6), round(float(high), 6),
                                round(float(low), 6), c, c, volume))
    return rows


def write_standin_fixtures(directory, tickers=tuple(PROFILES), **kwargs):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for ticker in tickers:
        path = directory / f"{ticker}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            write_ohlcv_csv(standin_rows(ticker, **kwargs), fh)
        paths.append(path)
    return paths
