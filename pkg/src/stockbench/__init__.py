"""Daily close forecasting benchmark: last value, autoregression, boosted trees, LSTM."""

__version__ = "0.1.0"
