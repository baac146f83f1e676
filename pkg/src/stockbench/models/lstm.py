"""Single-layer LSTM regressor trained with backpropagation through time.

Gate parameters are stored stacked in the order forget, input, output,
candidate: ``w_in`` has shape (4H,), ``u`` (4H, H) and ``b`` (4H,). Block
``k`` occupies rows ``k*H:(k+1)*H``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import (
    DimensionMismatchError,
    NonFiniteLossError,
    TooShortError,
    WrongWindowLengthError,
    ZeroVarianceError,
)
from ..rng import SplitMix64
from .gbt import windowed_examples

GATES = ("forget", "input", "output", "candidate")
PARAM_NAMES = ("w_in", "u", "b", "head_w", "head_b")


@dataclass(frozen=True)
class LstmConfig:
    hidden: int = 32
    epochs: int = 50
    batch: int = 32
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if min(self.hidden, self.epochs, self.batch) < 1:
            raise ValueError("hidden, epochs and batch must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1) or self.epsilon <= 0:
            raise ValueError("need 0 <= beta < 1 and epsilon > 0")


@dataclass(frozen=True)
class ScalerMinMax:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError("scaler needs hi > lo")

    @classmethod
    def fit(cls, values):
        lo, hi = float(np.min(values)), float(np.max(values))
        if lo == hi:
            raise ZeroVarianceError("cannot min-max scale a constant series")
        return cls(lo, hi)

    def transform(self, values):
        return (np.asarray(values, dtype=np.float64) - self.lo) / (self.hi - self.lo)

    def inverse(self, values):
        return self.lo + np.asarray(values, dtype=np.float64) * (self.hi - self.lo)


@dataclass(frozen=True)
class LstmParams:
    w_in: np.ndarray
    u: np.ndarray
    b: np.ndarray
    head_w: np.ndarray
    head_b: float
    scaler: ScalerMinMax
    window: int
    train_losses: tuple = field(default=(), compare=False)

    @property
    def hidden(self):
        return len(self.head_w)

    def gate(self, name):
        """``(W, U, b)`` for one gate, with W shaped (H, 1)."""
        k, H = GATES.index(name), self.hidden
        rows = slice(k * H, (k + 1) * H)
        return self.w_in[rows, None], self.u[rows], self.b[rows]

    def arrays(self):
        return {"w_in": self.w_in, "u": self.u, "b": self.b,
                "head_w": self.head_w, "head_b": np.float64(self.head_b)}

    def with_arrays(self, arrays):
        return replace(self, w_in=arrays["w_in"], u=arrays["u"], b=arrays["b"],
                       head_w=arrays["head_w"], head_b=float(arrays["head_b"]))


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _step(x, h_prev, c_prev, w_in, u, b):
    """One recurrence step for a batch: x (B,), h_prev and c_prev (B, H)."""
    H = h_prev.shape[1]
    z = x[:, None] * w_in + h_prev @ u.T + b
    f = _sigmoid(z[:, :H])
    i = _sigmoid(z[:, H:2 * H])
    o = _sigmoid(z[:, 2 * H:3 * H])
    g = np.tanh(z[:, 3 * H:])
    c = f * c_prev + i * g
    tc = np.tanh(c)
    return o * tc, c, (f, i, o, g, tc)


def lstm_cell_forward(x, h_prev, c_prev, params: LstmParams):
    """Single-sample step: scalar input, (H,) states in and out."""
    h_prev = np.asarray(h_prev, dtype=np.float64)
    c_prev = np.asarray(c_prev, dtype=np.float64)
    H = params.hidden
    if (h_prev.shape != (H,) or c_prev.shape != (H,) or params.w_in.shape != (4 * H,)
            or params.u.shape != (4 * H, H) or params.b.shape != (4 * H,)):
        raise DimensionMismatchError(f"state/parameter shapes inconsistent with H={H}")
    h, c, _ = _step(np.array([float(x)]), h_prev[None], c_prev[None],
                    params.w_in, params.u, params.b)
    return h[0], c[0]


def _forward(arrays, X, keep=False):
    B, W = X.shape
    H = arrays["head_w"].shape[0]
    h = np.zeros((B, H))
    c = np.zeros((B, H))
    cache = []
    for t in range(W):
        h_prev, c_prev = h, c
        h, c, gates = _step(X[:, t], h_prev, c_prev, arrays["w_in"], arrays["u"], arrays["b"])
        if keep:
            cache.append((h_prev, c_prev, gates))
    out = h @ arrays["head_w"] + arrays["head_b"]
    return out, h, cache


def lstm_forward(params: LstmParams, X_scaled):
    """Head output (still in scaled units) for each row of scaled windows."""
    X_scaled = np.atleast_2d(np.asarray(X_scaled, dtype=np.float64))
    return _forward(params.arrays(), X_scaled)[0]


def loss_and_grads(arrays, X, y):
    """Mean squared error on scaled data and its gradient w.r.t. every array."""
    B, W = X.shape
    out, h_last, cache = _forward(arrays, X, keep=True)
    err = out - y
    loss = float(np.mean(err ** 2))
    u = arrays["u"]
    H = u.shape[1]

    dout = 2.0 * err / B
    grads = {
        "head_w": h_last.T @ dout,
        "head_b": np.float64(dout.sum()),
        "w_in": np.zeros_like(arrays["w_in"]),
        "u": np.zeros_like(u),
        "b": np.zeros_like(arrays["b"]),
    }
    dh = dout[:, None] * arrays["head_w"][None, :]
    dc = np.zeros((B, H))
    for t in range(W - 1, -1, -1):
        h_prev, c_prev, (f, i, o, g, tc) = cache[t]
        do = dh * tc
        dc = dc + dh * o * (1.0 - tc * tc)
        dz = np.concatenate([
            dc * c_prev * f * (1.0 - f),
            dc * g * i * (1.0 - i),
            do * o * (1.0 - o),
            dc * i * (1.0 - g * g),
        ], axis=1)
        grads["w_in"] += X[:, t] @ dz
        grads["u"] += dz.T @ h_prev
        grads["b"] += dz.sum(axis=0)
        dh = dz @ u
        dc = dc * f
    return loss, grads


def init_params(hidden, window, scaler, rng: SplitMix64) -> LstmParams:
    """Uniform(+-1/sqrt(fan_in)) weights; zero biases except forget = 1."""
    H = hidden
    bound = 1.0 / np.sqrt(1 + H)
    w_in = rng.uniform(-bound, bound, 4 * H)
    u = rng.uniform(-bound, bound, (4 * H, H))
    head_w = rng.uniform(-1.0 / np.sqrt(H), 1.0 / np.sqrt(H), H)
    b = np.zeros(4 * H)
    b[:H] = 1.0
    return LstmParams(w_in, u, b, head_w, 0.0, scaler, window)


def _adam_epochs(arrays, X, y, config, rng):
    m = {k: np.zeros_like(v) for k, v in arrays.items()}
    v2 = {k: np.zeros_like(v) for k, v in arrays.items()}
    losses = [float(np.mean((_forward(arrays, X)[0] - y) ** 2))]
    step = 0
    n = len(y)
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch):
            batch = order[start:start + config.batch]
            loss, grads = loss_and_grads(arrays, X[batch], y[batch])
            if not np.isfinite(loss):
                raise NonFiniteLossError(
                    f"LSTM training diverged at epoch {epoch}, batch starting {start}: "
                    f"loss={loss} (learning_rate={config.learning_rate})")
            step += 1
            c1 = 1.0 - config.beta1 ** step
            c2 = 1.0 - config.beta2 ** step
            for k in PARAM_NAMES:
                gk = grads[k]
                m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * gk
                v2[k] = config.beta2 * v2[k] + (1.0 - config.beta2) * gk * gk
                arrays[k] = arrays[k] - config.learning_rate * (m[k] / c1) / (
                    np.sqrt(v2[k] / c2) + config.epsilon)
        epoch_loss = float(np.mean((_forward(arrays, X)[0] - y) ** 2))
        if not np.isfinite(epoch_loss):
            raise NonFiniteLossError(f"LSTM training diverged after epoch {epoch}")
        losses.append(epoch_loss)
    return losses


def lstm_train(train, config: LstmConfig = LstmConfig(), window=10, seed=0) -> LstmParams:
    """Fit on min-max scaled windows with Adam over shuffled mini-batches.

    ``train_losses`` on the result holds the full-data loss at initialisation
    followed by the loss after every epoch.
    """
    closes = np.asarray(getattr(train, "closes", train), dtype=np.float64)
    if len(closes) < window + 2:
        raise TooShortError(f"LSTM with window {window} needs {window + 2} observations, "
                            f"got {len(closes)}")
    scaler = ScalerMinMax.fit(closes)
    X, y = windowed_examples(scaler.transform(closes), window)
    rng = SplitMix64(seed)
    params = init_params(config.hidden, window, scaler, rng)
    arrays = {k: np.array(v, dtype=np.float64) for k, v in params.arrays().items()}
    with np.errstate(over="ignore", invalid="ignore"):
        losses = _adam_epochs(arrays, X, y, config, rng)
    return replace(params.with_arrays(arrays), train_losses=tuple(losses))


def lstm_predict(params: LstmParams, window) -> float:
    """Forecast in USD; inputs outside the training range are not clamped."""
    window = np.asarray(window, dtype=np.float64)
    if len(window) != params.window:
        raise WrongWindowLengthError(f"expected a window of {params.window}, got {len(window)}")
    out = lstm_forward(params, params.scaler.transform(window)[None, :])
    return float(params.scaler.inverse(out[0]))
