"""Reading, writing, validating and downloading Yahoo-style daily OHLCV CSV."""
from __future__ import annotations

import csv
import datetime as dt
import io
import logging
import math
import socket
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadHeaderError,
    BadRowError,
    EmptyDataError,
    FetchTimeoutError,
    HttpStatusError,
    NetworkUnavailableError,
    OutOfOrderError,
)
from .series import PriceSeries

logger = logging.getLogger(__name__)

HEADER = ["Date", "Open", "High", "Low", "Close", "Adj Close", "Volume"]
PRICE_COLUMNS = {"close": "Close", "adj_close": "Adj Close"}

JUMP_THRESHOLD = 0.5
GAP_DAYS = 10


@dataclass(frozen=True)
class RawOhlcvRow:
    date: dt.date
    open: float
    high: float
    low: float
    close: float
    adj_close: float
    volume: int


def _parse_price(text, name):
    if text.strip().lower() == "null":
        raise ValueError(f"{name} is null")
    value = float(text)
    if not math.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be finite and > 0, got {text!r}")
    return value


def _parse_row(fields):
    if len(fields) != len(HEADER):
        raise ValueError(f"expected {len(HEADER)} fields, got {len(fields)}")
    if any(f.strip().lower() == "null" for f in fields):
        raise ValueError("null cell")
    try:
        date = dt.date.fromisoformat(fields[0].strip())
    except ValueError:
        raise ValueError(f"bad date {fields[0]!r}") from None
    prices = [_parse_price(f, name) for f, name in zip(fields[1:6], HEADER[1:6])]
    volume = float(fields[6])
    if not volume.is_integer() or volume < 0:
        raise ValueError(f"volume must be a non-negative integer, got {fields[6]!r}")
    return RawOhlcvRow(date, *prices, int(volume))


def read_ohlcv_rows(stream):
    """Parse every data row, collecting problems instead of stopping at the first.

    Returns ``(rows, issues)`` where ``issues`` holds one :class:`RowError`
    per rejected row, so ``len(rows) + len(issues)`` is the number of data rows.
    Blank lines are ignored.
    """
    if isinstance(stream, (str, bytes)):
        stream = io.StringIO(stream.decode("utf-8") if isinstance(stream, bytes) else stream)
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is not None and header and header[0].startswith("\ufeff"):
        header[0] = header[0][1:]
    if header is None or [h.strip() for h in header] != HEADER:
        raise BadHeaderError(f"expected header {','.join(HEADER)!r}, got {header!r}")

    rows, issues = [], []
    last_date = None
    for number, fields in enumerate(reader, start=1):
        if not fields or all(not f.strip() for f in fields):
            continue
        try:
            row = _parse_row(fields)
        except ValueError as exc:
            issues.append(BadRowError(number, str(exc)))
            continue
        if last_date is not None and row.date <= last_date:
            issues.append(OutOfOrderError(number, f"{row.date} does not follow {last_date}"))
            continue
        if row.low > min(row.open, row.close) or row.high < max(row.open, row.close):
            logger.warning("row %d (%s): high/low inconsistent with open/close", number, row.date)
        rows.append(row)
        last_date = row.date
    return rows, issues


def parse_ohlcv_csv(stream, ticker, column="close") -> PriceSeries:
    """Parse Yahoo-format CSV text (or a text stream) into a close series.

    ``column`` selects ``"close"`` (default) or ``"adj_close"``. Any bad or
    out-of-order row raises; the first problem is raised and carries the full
    list on ``.issues``.
    """
    if column not in PRICE_COLUMNS:
        raise ValueError(f"column must be one of {sorted(PRICE_COLUMNS)}")
    rows, issues = read_ohlcv_rows(stream)
    if issues:
        first = issues[0]
        first.issues = issues
        first.n_parsed = len(rows)
        raise first
    if not rows:
        raise EmptyDataError(f"{ticker}: no data rows")
    attr = "adj_close" if column == "adj_close" else "close"
    return PriceSeries(
        ticker,
        np.array([r.date for r in rows], dtype="datetime64[D]"),
        np.array([getattr(r, attr) for r in rows], dtype=np.float64),
    )


def load_series(path, ticker=None, column="close") -> PriceSeries:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_ohlcv_csv(fh, ticker or path.stem, column)


def write_ohlcv_csv(rows, stream):
    """Write :class:`RawOhlcvRow` records with ``repr`` floats (lossless)."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(HEADER)
    for r in rows:
        writer.writerow([r.date.isoformat(), repr(r.open), repr(r.high), repr(r.low),
                         repr(r.close), repr(r.adj_close), r.volume])


def series_to_rows(series: PriceSeries):
    """Degenerate OHLCV rows (all prices equal the close, zero volume)."""
    return [RawOhlcvRow(d, c, c, c, c, c, 0) for d, c in series.points]


@dataclass(frozen=True)
class ValidationWarning:
    kind: str
    date: dt.date
    message: str


def validate(series: PriceSeries):
    """Flag suspicious day-over-day moves and calendar gaps.

    A relative change above 50% is reported as a possible unadjusted split; a
    gap of more than 10 calendar days between observations is reported too.
    """
    warnings = []
    gaps = np.diff(series.dates).astype(np.int64)
    assert np.all(gaps > 0), "PriceSeries invariant violated: repeated timestamp"
    c = series.closes
    change = np.abs(c[1:] / c[:-1] - 1.0)
    for i in range(len(gaps)):
        day = series.dates[i + 1].item()
        if change[i] > JUMP_THRESHOLD:
            warnings.append(ValidationWarning(
                "jump", day, f"close moved {change[i]:.0%} from {c[i]:g} to {c[i + 1]:g}; "
                "possible unadjusted split"))
        if gaps[i] > GAP_DAYS:
            warnings.append(ValidationWarning(
                "gap", day, f"{gaps[i]} calendar days since previous observation"))
    return warnings


def _is_timeout(exc):
    if isinstance(exc, (socket.timeout, TimeoutError)):
        return True
    return isinstance(exc, urllib.error.URLError) and isinstance(exc.reason, (socket.timeout, TimeoutError))


def fetch_remote(url_template, ticker, start, end, *, allow_network=False, timeout=30.0,
                 retries=3, backoff=1.0, sleep=time.sleep, opener=None) -> str:
    """GET the CSV for ``ticker`` between ``start`` and ``end``.

    ``url_template`` must contain ``{ticker}``, ``{start}`` and ``{end}``;
    dates are substituted as ISO days. Connection failures, timeouts and 5xx
    answers are retried at most ``retries`` times with delays of
    ``backoff * 2**i`` seconds. Other non-200 statuses fail immediately.
    """
    for key in ("{ticker}", "{start}", "{end}"):
        if key not in url_template:
            raise ValueError(f"url_template lacks the {key} placeholder")
    if not allow_network:
        raise NetworkUnavailableError("network access is disabled by configuration")
    url = url_template.format(ticker=ticker, start=np.datetime64(start, "D"),
                              end=np.datetime64(end, "D"))
    opener = opener or urllib.request.urlopen

    last_exc = None
    for attempt in range(retries + 1):
        if attempt:
            sleep(backoff * 2 ** (attempt - 1))
        try:
            with opener(url, timeout=timeout) as resp:
                status = getattr(resp, "status", 200)
                if status != 200:
                    raise HttpStatusError(status, url)
                return resp.read().decode("utf-8")
        except urllib.error.HTTPError as exc:
            last_exc = HttpStatusError(exc.code, url)
            if exc.code < 500:
                raise last_exc from None
        except HttpStatusError:
            raise
        except (urllib.error.URLError, OSError) as exc:
            if _is_timeout(exc):
                last_exc = FetchTimeoutError(f"timed out after {timeout}s: {url}")
            else:
                last_exc = NetworkUnavailableError(f"{url}: {exc}")
        logger.info("fetch attempt %d for %s failed: %s", attempt + 1, ticker, last_exc)
    raise last_exc
