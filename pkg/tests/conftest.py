from pathlib import Path

import numpy as np
import pytest

from stockbench.series import PriceSeries

ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = ROOT / "data"
STANDIN_DIR = DATA_DIR / "standin"
TEST_DATA = Path(__file__).resolve().parent / "data"
TICKERS = ("MSFT", "AAPL", "TSLA", "GOOG", "AMZN", "FB")

# filled by tests/test_acceptance.py, printed after the run
ACCEPTANCE_LINES = {}


def make_series(values, ticker="TEST", start="2020-01-01"):
    values = np.asarray(values, dtype=np.float64)
    dates = np.datetime64(start, "D") + np.arange(len(values))
    return PriceSeries(ticker, dates, values)


@pytest.fixture
def series_factory():
    return make_series


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (len(k), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
