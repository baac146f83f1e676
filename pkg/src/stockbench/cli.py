"""Command-line entry point: ``stats``, ``lagplot``, ``bench`` and ``fetch``.

Exit codes: 0 success, 1 internal failure, 2 usage/config/data error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime as dt
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import evaluation, ingest
from .errors import (
    ConfigParseError,
    InvalidValueError,
    StockBenchError,
    UnknownKeyError,
)
from .models import VARIANTS, ForecasterConfig, GbtConfig, LstmConfig, fit_forecaster
from .series import autocorrelation, lag_pairs, split_at, summary_stats, write_lag_pairs_csv

logger = logging.getLogger("stockbench")

DEFAULT_TICKERS = ("MSFT", "AAPL", "TSLA", "GOOG", "AMZN", "FB")


@dataclass(frozen=True)
class RunConfig:
    data_dir: str = "data"
    tickers: tuple = DEFAULT_TICKERS
    split_date: str = "2020-01-01"
    models: tuple = VARIANTS
    seed: int = 42
    output_dir: str = "out"
    jobs: int = 1
    price_column: str = "close"
    refit: bool = False
    ar_lag_order: int = 1
    window: int = 10
    gbt_rounds: int = 100
    gbt_max_depth: int | None = 3
    gbt_shrinkage: float = 0.1
    gbt_l2: float = 1.0
    gbt_min_leaf: int = 2
    lstm_hidden: int = 32
    lstm_epochs: int = 50
    lstm_batch: int = 32
    lstm_learning_rate: float = 1e-3
    lstm_beta1: float = 0.9
    lstm_beta2: float = 0.999
    lstm_epsilon: float = 1e-8
    url_template: str = ""
    start: str = "2015-01-01"
    end: str = "2021-04-30"
    allow_network: bool = False

    def __post_init__(self):
        object.__setattr__(self, "tickers", tuple(self.tickers))
        object.__setattr__(self, "models", tuple(self.models))
        if not self.tickers:
            raise InvalidValueError("tickers must not be empty")
        if not self.models:
            raise InvalidValueError("models must not be empty")
        bad = [m for m in self.models if m not in VARIANTS]
        if bad:
            raise InvalidValueError(f"unknown model(s) {bad}; choose from {list(VARIANTS)}")
        if len(set(self.models)) != len(self.models) or len(set(self.tickers)) != len(self.tickers):
            raise InvalidValueError("tickers and models must not repeat")
        for key in ("split_date", "start", "end"):
            try:
                dt.date.fromisoformat(getattr(self, key))
            except (TypeError, ValueError):
                raise InvalidValueError(f"{key} must be YYYY-MM-DD, got {getattr(self, key)!r}") from None
        if self.price_column not in ingest.PRICE_COLUMNS:
            raise InvalidValueError("price_column must be 'close' or 'adj_close'")
        if self.jobs < 1:
            raise InvalidValueError("jobs must be >= 1")
        try:
            self.forecaster_config("last_value")
        except ValueError as exc:
            raise InvalidValueError(str(exc)) from None

    def forecaster_config(self, variant) -> ForecasterConfig:
        return ForecasterConfig(
            variant=variant,
            lag_order=self.ar_lag_order,
            window=self.window,
            gbt=GbtConfig(self.gbt_rounds, self.gbt_max_depth, self.gbt_shrinkage,
                          self.gbt_l2, self.gbt_min_leaf),
            lstm=LstmConfig(self.lstm_hidden, self.lstm_epochs, self.lstm_batch,
                            self.lstm_learning_rate, self.lstm_beta1, self.lstm_beta2,
                            self.lstm_epsilon),
            seed=self.seed,
        )


def _expected_type(f):
    default = f.default
    if f.name == "gbt_max_depth":
        return (int, type(None))
    if isinstance(default, tuple):
        return (list,)
    if isinstance(default, bool):
        return (bool,)
    if isinstance(default, float):
        return (int, float)
    return (type(default),)


def _check_value(key, value):
    f = {f.name: f for f in dataclasses.fields(RunConfig)}[key]
    types = _expected_type(f)
    ok = isinstance(value, types)
    if ok and bool not in types and isinstance(value, bool):
        ok = False
    if ok and isinstance(value, list):
        ok = all(isinstance(v, str) for v in value)
    if not ok:
        raise InvalidValueError(f"config key {key!r}: unexpected value {value!r}")
    return tuple(value) if isinstance(value, list) else value


def load_config(path, **overrides) -> RunConfig:
    """Read a flat JSON object; keyword ``overrides`` (e.g. CLI flags) win."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(path, exc.lineno, exc.colno, exc.msg) from None
    if not isinstance(raw, dict):
        raise ConfigParseError(path, 1, 1, "top level must be a JSON object")
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise UnknownKeyError(f"{path}: unknown config key(s) {unknown}")
    values = {k: _check_value(k, v) for k, v in raw.items()}
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)


# -- commands ----------------------------------------------------------------

def _load(config: RunConfig, ticker):
    path = Path(config.data_dir) / f"{ticker}.csv"
    if not path.is_file():
        raise FileNotFoundError(f"missing data file {path}")
    return ingest.load_series(path, ticker, config.price_column)


def cmd_stats(config: RunConfig, out=None):
    out = out or sys.stdout
    rows = []
    for ticker in config.tickers:
        split = split_at(_load(config, ticker), config.split_date)
        for name, part in (("train", split.train), ("test", split.test)):
            s = summary_stats(part)
            rows.append([ticker, name, f"{s.mean:.4f}", f"{s.min:.4f}", f"{s.max:.4f}",
                         f"{s.sd:.4f}", str(s.count)])
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    header = ["ticker", "partition", "mean", "min", "max", "sd", "count"]
    with open(out_dir / "stats.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    for r in [header] + rows:
        print("  ".join(c.rjust(w) for c, w in zip(r, widths)), file=out)
    return out_dir / "stats.csv"


def cmd_lagplot(config: RunConfig, k, out=None):
    out = out or sys.stdout
    if k < 1:
        raise InvalidValueError("lag plots need --lag >= 1")
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for ticker in config.tickers:
        series = _load(config, ticker)
        pairs = lag_pairs(series, k)
        path = out_dir / f"lag_{ticker}_k{k}.csv"
        write_lag_pairs_csv(pairs, path)
        paths.append(path)
        print(f"{ticker}  r_{k} = {autocorrelation(series, k):.6f}", file=out)
    return paths


class CellError(Exception):
    """A benchmark cell failed; wraps the original exception."""

    def __init__(self, cell, cause):
        super().__init__(f"cell {cell[0]}/{cell[1]} failed: {cause}")
        self.cell = cell
        self.cause = cause


def _run_cell(split, fconfig, refit):
    model = fit_forecaster(split.train, fconfig)
    return evaluation.walk_forward(model, split, refit=refit, config=fconfig)


def cmd_bench(config: RunConfig, out=None):
    out = out or sys.stdout
    splits = {t: split_at(_load(config, t), config.split_date) for t in config.tickers}
    cells = [(t, m) for t in config.tickers for m in config.models]
    jobs = [(splits[t], config.forecaster_config(m), config.refit) for t, m in cells]

    results = []
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            futures = [pool.submit(_run_cell, *job) for job in jobs]
            for cell, fut in zip(cells, futures):
                try:
                    results.append(fut.result())
                except Exception as exc:
                    raise CellError(cell, exc) from exc
    else:
        for cell, job in zip(cells, jobs):
            t0 = time.perf_counter()
            try:
                results.append(_run_cell(*job))
            except Exception as exc:
                raise CellError(cell, exc) from exc
            logger.info("%s/%s done in %.1fs", cell[0], cell[1], time.perf_counter() - t0)

    report = evaluation.build_error_report(results)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    try:
        path = out_dir / "report.csv"
        written.append(path)
        evaluation.write_report_csv(report, path)
        for res in results:
            path = out_dir / f"trace_{res.ticker}_{res.model}.csv"
            written.append(path)
            evaluation.write_trace_csv(res, path)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    print(evaluation.format_report(report), file=out)
    return report


def cmd_fetch(config: RunConfig, out=None):
    out = out or sys.stdout
    data_dir = Path(config.data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    for ticker in config.tickers:
        body = ingest.fetch_remote(config.url_template, ticker, config.start, config.end,
                                   allow_network=config.allow_network)
        series = ingest.parse_ohlcv_csv(body, ticker, config.price_column)
        for w in ingest.validate(series):
            print(f"{ticker}: {w.kind} on {w.date}: {w.message}", file=out)
        (data_dir / f"{ticker}.csv").write_text(body, encoding="utf-8")
        print(f"{ticker}: {len(series)} rows -> {data_dir / (ticker + '.csv')}", file=out)


# -- argument parsing ----------------------------------------------------------

def _csv_list(text):
    return tuple(x.strip() for x in text.split(",") if x.strip())


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="flat JSON config file")
    common.add_argument("--data-dir", default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    common.add_argument("--tickers", type=_csv_list, default=argparse.SUPPRESS)
    common.add_argument("--split", default=argparse.SUPPRESS, help="split date YYYY-MM-DD")
    common.add_argument("--adj-close", action="store_true", default=argparse.SUPPRESS,
                        help="use the Adj Close column instead of Close")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="stockbench", parents=[common],
                                     description="Daily close forecasting benchmark.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("stats", parents=[common], help="summary statistics per partition")
    lag = sub.add_parser("lagplot", parents=[common], help="lag-pair CSVs and r_k")
    lag.add_argument("--lag", type=int, required=True)
    bench = sub.add_parser("bench", parents=[common], help="walk-forward benchmark")
    bench.add_argument("--models", type=_csv_list, default=argparse.SUPPRESS)
    bench.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    bench.add_argument("--jobs", type=int, default=argparse.SUPPRESS)
    bench.add_argument("--refit", action="store_true", default=argparse.SUPPRESS,
                       help="re-fit before every test step (slow)")
    fetch = sub.add_parser("fetch", parents=[common], help="download CSVs into the data dir")
    fetch.add_argument("--url-template", default=argparse.SUPPRESS)
    fetch.add_argument("--start", default=argparse.SUPPRESS)
    fetch.add_argument("--end", default=argparse.SUPPRESS)
    fetch.add_argument("--allow-network", action="store_true", default=argparse.SUPPRESS)
    return parser


_FLAG_KEYS = {
    "data_dir": "data_dir", "out": "output_dir", "tickers": "tickers", "models": "models",
    "split": "split_date", "seed": "seed", "jobs": "jobs", "refit": "refit",
    "url_template": "url_template", "start": "start", "end": "end",
    "allow_network": "allow_network",
}


def config_from_args(args) -> RunConfig:
    ns = vars(args)
    overrides = {key: ns[flag] for flag, key in _FLAG_KEYS.items() if flag in ns}
    if ns.get("adj_close"):
        overrides["price_column"] = "adj_close"
    if "config" in ns:
        return load_config(ns["config"], **overrides)
    return RunConfig(**overrides)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(args)
        if args.command == "stats":
            cmd_stats(config)
        elif args.command == "lagplot":
            cmd_lagplot(config, args.lag)
        elif args.command == "bench":
            cmd_bench(config)
        else:
            cmd_fetch(config)
    except CellError as exc:
        print(f"stockbench: error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc.cause, (StockBenchError, OSError)) else 1
    except (StockBenchError, OSError) as exc:
        print(f"stockbench: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        logger.exception("internal failure")
        print(f"stockbench: internal error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
