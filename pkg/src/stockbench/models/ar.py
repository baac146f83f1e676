"""Autoregression fitted by ordinary least squares."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SingularDesignError, TooShortError, WrongLagCountError

# relative pivot size below which the normal equations are declared singular
PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class ARModel:
    """``y_t = intercept + sum_j coefficients[j-1] * y_{t-j}``."""

    intercept: float
    coefficients: tuple

    def __post_init__(self):
        coefs = tuple(float(c) for c in self.coefficients)
        if not coefs:
            raise ValueError("an AR model needs at least one coefficient")
        if not all(np.isfinite(coefs)) or not np.isfinite(self.intercept):
            raise ValueError("AR parameters must be finite")
        object.__setattr__(self, "coefficients", coefs)
        object.__setattr__(self, "intercept", float(self.intercept))

    @property
    def order(self):
        return len(self.coefficients)


def solve_pivoted(a, b):
    """Solve ``a x = b`` by Gaussian elimination with partial pivoting.

    Raises :class:`SingularDesignError` when a pivot is negligible relative
    to the largest entry of its column in the original matrix.
    """
    a = np.array(a, dtype=np.float64)
    b = np.array(b, dtype=np.float64)
    n = len(b)
    scale = np.max(np.abs(a), axis=0)
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[piv, col]) <= PIVOT_RTOL * scale[col]:
            raise SingularDesignError(f"design matrix is singular (column {col})")
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            b[[col, piv]] = b[[piv, col]]
        factors = a[col + 1:, col] / a[col, col]
        a[col + 1:, col:] -= np.outer(factors, a[col, col:])
        b[col + 1:] -= factors * b[col]
    x = np.empty(n)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - a[row, row + 1:] @ x[row + 1:]) / a[row, row]
    return x


def lag_matrix(y, p):
    """Design matrix ``[1, y_{t-1}, ..., y_{t-p}]`` and targets ``y_t`` for t >= p."""
    y = np.asarray(y, dtype=np.float64)
    n = len(y) - p
    cols = [np.ones(n)] + [y[p - j: p - j + n] for j in range(1, p + 1)]
    return np.column_stack(cols), y[p:]


def ar_fit(train, p=1) -> ARModel:
    """Least-squares AR(p) fit via the normal equations."""
    y = getattr(train, "closes", train)
    if p < 1:
        raise ValueError("lag order must be >= 1")
    if len(y) < p + 2:
        raise TooShortError(f"AR({p}) needs at least {p + 2} observations, got {len(y)}")
    x, target = lag_matrix(y, p)
    beta = solve_pivoted(x.T @ x, x.T @ target)
    return ARModel(beta[0], tuple(beta[1:]))


def ar_predict(model: ARModel, lags) -> float:
    """One-step forecast from the last ``p`` values (most recent last)."""
    lags = np.asarray(lags, dtype=np.float64)
    if len(lags) != model.order:
        raise WrongLagCountError(f"AR({model.order}) needs {model.order} lags, got {len(lags)}")
    value = model.intercept
    for j, phi in enumerate(model.coefficients, start=1):
        value += phi * lags[-j]
    return float(value)
