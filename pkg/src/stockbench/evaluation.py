"""One-step-ahead walk-forward evaluation, error metrics and report files."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ContextTooShortError, DuplicateCellError, EmptyResultError
from .models import Forecaster, ForecasterConfig, fit_forecaster
from .series import PriceSeries, SplitSeries


@dataclass(frozen=True)
class ForecastResult:
    ticker: str
    model: str
    dates: np.ndarray
    actual: np.ndarray
    predicted: np.ndarray

    @property
    def rows(self):
        return [(d.item(), float(a), float(p))
                for d, a, p in zip(self.dates, self.actual, self.predicted)]

    def __len__(self):
        return len(self.actual)


@dataclass
class ErrorReport:
    """``(ticker, model) -> (mae, rmse)`` in insertion order."""

    cells: dict = field(default_factory=dict)

    @property
    def tickers(self):
        return list(dict.fromkeys(t for t, _ in self.cells))

    @property
    def models(self):
        return list(dict.fromkeys(m for _, m in self.cells))


def walk_forward(forecaster: Forecaster, split: SplitSeries, *, refit=False,
                 config: ForecasterConfig | None = None) -> ForecastResult:
    """Predict every test observation from the actual observations before it.

    Actuals are always fed back; forecasts never are. With ``refit=True`` the
    model is re-fitted on the expanding history before every step, which
    requires ``config`` and is slow for the learned models.
    """
    train, test = split.train, split.test
    need = forecaster.context_length
    if len(train) < need:
        raise ContextTooShortError(
            f"{split.ticker}: {forecaster.variant} needs {need} training observations "
            f"of context, got {len(train)}")
    if refit and config is None:
        raise ValueError("refit=True needs the forecaster config")
    full = np.concatenate([train.closes, test.closes])
    full_dates = np.concatenate([train.dates, test.dates])
    n0 = len(train)
    preds = np.empty(len(test))
    model = forecaster
    for i in range(len(test)):
        end = n0 + i
        if refit and i > 0:
            model = fit_forecaster(PriceSeries(split.ticker, full_dates[:end], full[:end]), config)
        preds[i] = model.predict(full[end - need:end])
    if not np.all(np.isfinite(preds)):
        raise FloatingPointError(f"{split.ticker}/{forecaster.variant}: non-finite forecast")
    return ForecastResult(split.ticker, forecaster.variant, test.dates.copy(),
                          test.closes.copy(), preds)


def _errors(result):
    if len(result) == 0:
        raise EmptyResultError(f"{result.ticker}/{result.model}: no forecast rows")
    return np.asarray(result.actual) - np.asarray(result.predicted)


def mae(result: ForecastResult) -> float:
    return float(np.mean(np.abs(_errors(result))))


def rmse(result: ForecastResult) -> float:
    err = np.abs(_errors(result))
    # scale first so that squaring tiny errors cannot underflow to zero
    top = float(err.max())
    if top == 0.0 or not np.isfinite(top):
        return top
    return float(top * np.sqrt(np.mean((err / top) ** 2)))


def build_error_report(results) -> ErrorReport:
    report = ErrorReport()
    for res in results:
        key = (res.ticker, res.model)
        if key in report.cells:
            raise DuplicateCellError(f"duplicate report cell {key}")
        a, r = mae(res), rmse(res)
        # power-mean inequality; slack only for rounding when all errors are equal
        if r < a * (1 - 1e-12):
            raise ArithmeticError(f"{key}: rmse {r} < mae {a}")
        report.cells[key] = (a, r)
    return report


def write_report_csv(report: ErrorReport, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["ticker", "model", "mae", "rmse"])
        for (ticker, model), (a, r) in report.cells.items():
            writer.writerow([ticker, model, f"{a:.4f}", f"{r:.4f}"])


def write_trace_csv(result: ForecastResult, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "actual", "predicted"])
        for d, a, p in zip(result.dates, result.actual, result.predicted):
            writer.writerow([str(d), f"{a:.4f}", f"{p:.4f}"])


def format_report(report: ErrorReport) -> str:
    """Report as a text table: one row per (metric, ticker), one column per model."""
    models = report.models
    header = ["metric", "ticker"] + models
    lines = []
    for idx, metric in enumerate(("MAE", "RMSE")):
        for ticker in report.tickers:
            cells = [f"{report.cells[(ticker, m)][idx]:.4f}" if (ticker, m) in report.cells
                     else "-" for m in models]
            lines.append([metric, ticker] + cells)
    widths = [max(len(r[i]) for r in [header] + lines) for i in range(len(header))]

    def fmt(row):
        return "  ".join(c.ljust(w) if i < 2 else c.rjust(w)
                         for i, (c, w) in enumerate(zip(row, widths)))

    return "\n".join([fmt(header), "  ".join("-" * w for w in widths)] + [fmt(r) for r in lines])
