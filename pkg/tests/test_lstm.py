import math
from collections import namedtuple

import numpy as np
import pytest

from stockbench.errors import (
    DimensionMismatchError,
    NonFiniteLossError,
    TooShortError,
    WrongWindowLengthError,
)
from stockbench.models import LstmConfig, LstmParams, ScalerMinMax, lstm_cell_forward
from stockbench.models import lstm_predict, lstm_train
from stockbench.models.gbt import windowed_examples
from stockbench.models.lstm import init_params, loss_and_grads, lstm_forward
from stockbench.rng import SplitMix64

from .conftest import STANDIN_DIR


def zero_params(H, lo=0.0, hi=1.0, window=3):
    return LstmParams(np.zeros(4 * H), np.zeros((4 * H, H)), np.zeros(4 * H), np.zeros(H), 0.0,
                      ScalerMinMax(lo, hi), window)


def random_params(H, window, seed):
    return init_params(H, window, ScalerMinMax(0.0, 1.0), SplitMix64(seed))


def scalar_cell(x, h_prev, c_prev, params):
    """Element-by-element LSTM step with plain floats."""
    H = params.hidden
    sig = lambda v: 1.0 / (1.0 + math.exp(-v))  # noqa: E731
    h, c = [], []
    for k in range(H):
        pre = []
        for gate in range(4):
            row = gate * H + k
            z = params.w_in[row] * x + params.b[row]
            for m in range(H):
                z += params.u[row, m] * h_prev[m]
            pre.append(z)
        f, i, o, g = sig(pre[0]), sig(pre[1]), sig(pre[2]), math.tanh(pre[3])
        ck = f * c_prev[k] + i * g
        c.append(ck)
        h.append(o * math.tanh(ck))
    return np.array(h), np.array(c)


def test_zero_params_zero_state():
    h, c = lstm_cell_forward(0.7, np.zeros(4), np.zeros(4), zero_params(4))
    assert np.all(h == 0) and np.all(c == 0)


def test_zero_params_carry_cell():
    c0 = np.array([1.0, -2.0, 0.5])
    h, c = lstm_cell_forward(0.3, np.zeros(3), c0, zero_params(3))
    assert np.allclose(c, 0.5 * c0, atol=1e-15)
    assert np.allclose(h, 0.5 * np.tanh(0.5 * c0), atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_cell_matches_scalar_loop(seed):
    rng = np.random.default_rng(seed)
    H = 5
    p = LstmParams(rng.normal(size=4 * H), rng.normal(size=(4 * H, H)), rng.normal(size=4 * H),
                   rng.normal(size=H), 0.1, ScalerMinMax(0.0, 1.0), 3)
    x, h0, c0 = rng.normal(), rng.normal(size=H), rng.normal(size=H)
    h, c = lstm_cell_forward(x, h0, c0, p)
    h_ref, c_ref = scalar_cell(x, h0, c0, p)
    assert np.max(np.abs(h - h_ref)) < 1e-12
    assert np.max(np.abs(c - c_ref)) < 1e-12


def test_cell_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        lstm_cell_forward(0.0, np.zeros(3), np.zeros(4), zero_params(4))


def test_gate_accessor_shapes():
    p = random_params(4, 3, 0)
    W, U, b = p.gate("forget")
    assert W.shape == (4, 1) and U.shape == (4, 4) and np.all(b == 1.0)
    assert np.all(p.gate("input")[2] == 0.0)


GradCheck = namedtuple("GradCheck", "analytic numeric relative worst_entry")


def finite_difference_check(H, W, seed, n=8, step=1e-5):
    """Compare analytic gradients with central differences over every parameter.

    ``relative`` is ||a - n|| / max(||a||, ||n||) over the whole gradient
    vector. ``worst_entry`` is the largest per-entry ratio with a 1e-8 floor;
    it is reported for context only, because entries near 1e-9 sit at the
    roundoff floor of the difference quotient.
    """
    rng = np.random.default_rng(seed)
    arrays = {k: np.array(v, dtype=float) for k, v in random_params(H, W, seed).arrays().items()}
    arrays["head_b"] = np.float64(rng.normal(scale=0.1))
    X = rng.uniform(0, 1, (n, W))
    y = rng.uniform(0, 1, n)
    _, grads = loss_and_grads(arrays, X, y)
    analytic, numeric = [], []
    for name, value in arrays.items():
        for idx in range(np.size(value)):
            shifted = []
            for sign in (1.0, -1.0):
                trial = {k: np.array(v, copy=True) for k, v in arrays.items()}
                if trial[name].ndim == 0:
                    trial[name] = np.float64(value + sign * step)
                else:
                    trial[name].reshape(-1)[idx] += sign * step
                shifted.append(loss_and_grads(trial, X, y)[0])
            numeric.append((shifted[0] - shifted[1]) / (2 * step))
            analytic.append(np.atleast_1d(grads[name]).reshape(-1)[idx])
    a, num = np.array(analytic), np.array(numeric)
    relative = np.linalg.norm(a - num) / max(np.linalg.norm(a), np.linalg.norm(num))
    worst = np.max(np.abs(a - num) / np.maximum(np.maximum(np.abs(a), np.abs(num)), 1e-8))
    return GradCheck(a, num, float(relative), float(worst))


@pytest.mark.parametrize("H,W,seed", [(4, 3, 0), (2, 5, 1), (8, 3, 2), (4, 5, 1)])
def test_gradient_check(H, W, seed):
    check = finite_difference_check(H, W, seed)
    assert check.relative < 1e-4
    # entry-wise: tight relative agreement, with an absolute allowance at the roundoff floor
    assert np.all(np.abs(check.analytic - check.numeric)
                  <= 1e-5 * np.abs(check.numeric) + 1e-10)


def test_inverse_scaling():
    p = zero_params(3, lo=0.0, hi=100.0)
    p = LstmParams(p.w_in, p.u, p.b, p.head_w, 0.5, p.scaler, 3)
    assert lstm_predict(p, [10.0, 20.0, 30.0]) == pytest.approx(50.0, abs=1e-12)


def test_window_length_checked():
    with pytest.raises(WrongWindowLengthError):
        lstm_predict(zero_params(3), [1.0, 2.0])


def test_too_short():
    with pytest.raises(TooShortError):
        lstm_train(np.arange(1.0, 5.0), window=3)


SMALL = LstmConfig(hidden=8, epochs=5, batch=16)


def test_determinism():
    y = 10 + np.sin(np.arange(120) / 5.0)
    a = lstm_train(y, SMALL, window=4, seed=123)
    b = lstm_train(y, SMALL, window=4, seed=123)
    for k, v in a.arrays().items():
        assert np.array_equal(v, b.arrays()[k])
    assert a.train_losses == b.train_losses
    c = lstm_train(y, SMALL, window=4, seed=124)
    assert not np.array_equal(a.u, c.u)


def test_loss_decreases_on_linear_series():
    y = np.linspace(10.0, 50.0, 300)
    p = lstm_train(y, LstmConfig(hidden=8), window=5, seed=7)
    assert len(p.train_losses) == 51
    assert p.train_losses[-1] < p.train_losses[0]


def test_predict_matches_training_forward():
    y = 10 + np.sin(np.arange(120) / 5.0)
    p = lstm_train(y, SMALL, window=4, seed=1)
    X, _ = windowed_examples(p.scaler.transform(y), 4)
    batch_out = p.scaler.inverse(lstm_forward(p, X))
    raw, _ = windowed_examples(y, 4)
    for i in (0, 17, len(X) - 1):
        assert lstm_predict(p, raw[i]) == pytest.approx(batch_out[i], rel=1e-12)


def test_extrapolation_is_finite_and_unclamped():
    from stockbench.ingest import load_series
    from stockbench.series import split_at

    train = split_at(load_series(STANDIN_DIR / "MSFT.csv"), "2020-01-01").train
    p = lstm_train(train, SMALL, window=10, seed=3)
    above = train.closes.max() * np.linspace(1.2, 1.5, 10)
    pred = lstm_predict(p, above)
    assert np.isfinite(pred)
    scaled = p.scaler.transform(above)
    assert scaled.min() > 1.0
    assert pred == pytest.approx(float(p.scaler.inverse(lstm_forward(p, scaled[None])[0])), rel=1e-12)


def test_divergence_raises():
    y = 10 + np.sin(np.arange(60) / 5.0)
    with pytest.raises(NonFiniteLossError):
        lstm_train(y, LstmConfig(hidden=4, epochs=3, batch=8, learning_rate=1e300), window=4)
