"""The four forecasters behind one fit-then-predict-next contract."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyHistoryError
from ..rng import derive_seed
from .ar import ARModel, ar_fit, ar_predict
from .gbt import GbtConfig, GbtEnsemble, RegressionTree, gbt_fit, gbt_predict
from .lstm import (
    LstmConfig,
    LstmParams,
    ScalerMinMax,
    lstm_cell_forward,
    lstm_predict,
    lstm_train,
)

VARIANTS = ("last_value", "autoregression", "gbt", "lstm")


def last_value_predict(history) -> float:
    if len(history) == 0:
        raise EmptyHistoryError("last-value forecast needs at least one observation")
    return float(history[-1])


@dataclass(frozen=True)
class ForecasterConfig:
    variant: str
    lag_order: int = 1
    window: int = 10
    gbt: GbtConfig = field(default_factory=GbtConfig)
    lstm: LstmConfig = field(default_factory=LstmConfig)
    seed: int = 42

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.lag_order < 1 or self.window < 1:
            raise ValueError("lag_order and window must be >= 1")


@dataclass(frozen=True)
class Forecaster:
    """A fitted model plus how much trailing history it consumes."""

    variant: str
    context_length: int
    model: object = None

    def predict(self, history) -> float:
        """Forecast the value following ``history`` (most recent last)."""
        history = np.asarray(history, dtype=np.float64)
        if self.variant == "last_value":
            return last_value_predict(history)
        window = history[len(history) - self.context_length:]
        if self.variant == "autoregression":
            return ar_predict(self.model, window)
        if self.variant == "gbt":
            return gbt_predict(self.model, window)
        return lstm_predict(self.model, window)


def fit_forecaster(train, config: ForecasterConfig) -> Forecaster:
    """Fit ``config.variant`` on ``train``.

    The LSTM's PRNG stream is derived from ``(seed, ticker, variant)`` so
    cells are reproducible independently of one another.
    """
    closes = getattr(train, "closes", train)
    if config.variant == "last_value":
        if len(closes) == 0:
            raise EmptyHistoryError("empty training series")
        return Forecaster("last_value", 1)
    if config.variant == "autoregression":
        return Forecaster("autoregression", config.lag_order, ar_fit(closes, config.lag_order))
    if config.variant == "gbt":
        return Forecaster("gbt", config.window, gbt_fit(closes, config.gbt, config.window))
    seed = derive_seed(config.seed, getattr(train, "ticker", ""), config.variant)
    return Forecaster("lstm", config.window,
                      lstm_train(closes, config.lstm, config.window, seed))


__all__ = [
    "VARIANTS", "ARModel", "Forecaster", "ForecasterConfig", "GbtConfig", "GbtEnsemble",
    "LstmConfig", "LstmParams", "RegressionTree", "ScalerMinMax", "ar_fit", "ar_predict",
    "fit_forecaster", "gbt_fit", "gbt_predict", "last_value_predict", "lstm_cell_forward",
    "lstm_predict", "lstm_train",
]
