"""Exception hierarchy.

Everything raised on purpose derives from :class:`StockBenchError`, so the CLI
can separate data/config problems (exit code 2) from genuine bugs (exit 1).
"""


class StockBenchError(Exception):
    """Base class for all expected failures."""


# -- series ------------------------------------------------------------------

class InvalidSeriesError(StockBenchError, ValueError):
    pass


class ZeroVarianceError(StockBenchError, ValueError):
    pass


class LagOutOfRangeError(StockBenchError, ValueError):
    pass


class EmptyPartitionError(StockBenchError, ValueError):
    pass


# -- ingest ------------------------------------------------------------------

class BadHeaderError(StockBenchError, ValueError):
    pass


class EmptyDataError(StockBenchError, ValueError):
    pass


class RowError(StockBenchError, ValueError):
    """A problem tied to one data row (1-based, header excluded).

    When a file has several bad rows the first one is raised and the complete
    list is available on ``issues``; ``n_parsed`` counts the good rows, so
    ``n_parsed + len(issues)`` always equals the number of data rows.
    """

    def __init__(self, row, message):
        super().__init__(f"row {row}: {message}")
        self.row = row
        self.issues = [self]
        self.n_parsed = 0


class BadRowError(RowError):
    pass


class OutOfOrderError(RowError):
    pass


class FetchError(StockBenchError):
    pass


class HttpStatusError(FetchError):
    def __init__(self, code, url=""):
        super().__init__(f"HTTP {code} for {url}" if url else f"HTTP {code}")
        self.code = code


class FetchTimeoutError(FetchError, TimeoutError):
    pass


class NetworkUnavailableError(FetchError):
    pass


# -- models ------------------------------------------------------------------

class EmptyHistoryError(StockBenchError, ValueError):
    pass


class TooShortError(StockBenchError, ValueError):
    pass


class SingularDesignError(StockBenchError, ArithmeticError):
    pass


class WrongLagCountError(StockBenchError, ValueError):
    pass


class WrongWindowLengthError(StockBenchError, ValueError):
    pass


class DimensionMismatchError(StockBenchError, ValueError):
    pass


class NonFiniteLossError(StockBenchError, FloatingPointError):
    pass


# -- evaluation --------------------------------------------------------------

class ContextTooShortError(StockBenchError, ValueError):
    pass


class EmptyResultError(StockBenchError, ValueError):
    pass


class DuplicateCellError(StockBenchError, ValueError):
    pass


# -- configuration -----------------------------------------------------------

class ConfigError(StockBenchError, ValueError):
    pass


class ConfigParseError(ConfigError):
    def __init__(self, path, line, column, message):
        super().__init__(f"{path}:{line}:{column}: {message}")
        self.line = line
        self.column = column


class UnknownKeyError(ConfigError):
    pass


class InvalidValueError(ConfigError):
    pass
