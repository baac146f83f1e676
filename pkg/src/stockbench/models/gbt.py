"""Gradient-boosted regression trees with second-order (Newton) leaves.

Squared-error loss, so every example has gradient ``prediction - target`` and
hessian 1. Splits are found by exhaustive (exact greedy) search over the
midpoints between consecutive distinct feature values.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import TooShortError, WrongWindowLengthError


@dataclass(frozen=True)
class GbtConfig:
    rounds: int = 100
    max_depth: int | None = 3
    shrinkage: float = 0.1
    l2: float = 1.0
    min_leaf: int = 2

    def __post_init__(self):
        if self.rounds < 1 or self.min_leaf < 1:
            raise ValueError("rounds and min_leaf must be positive")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be positive (or None for unbounded)")
        if not 0 < self.shrinkage <= 1:
            raise ValueError("shrinkage must be in (0, 1]")
        if self.l2 < 0:
            raise ValueError("l2 must be >= 0")


@dataclass(frozen=True)
class RegressionTree:
    """Flat node arrays; ``feature[i] == -1`` marks a leaf holding ``value[i]``.

    Internal node ``i`` sends a row left when ``row[feature[i]] < threshold[i]``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict_one(self, x):
        node = 0
        while self.feature[node] >= 0:
            node = self.left[node] if x[self.feature[node]] < self.threshold[node] else self.right[node]
        return self.value[node]

    def predict(self, X):
        X = np.atleast_2d(X)
        return np.array([self.predict_one(row) for row in X])

    @property
    def depth(self):
        def walk(node):
            if self.feature[node] < 0:
                return 0
            return 1 + max(walk(self.left[node]), walk(self.right[node]))
        return walk(0)

    @property
    def n_leaves(self):
        return int(np.sum(self.feature < 0))


@dataclass(frozen=True)
class GbtEnsemble:
    base_score: float
    shrinkage: float
    window: int
    trees: tuple = ()
    # fitting diagnostics: loss before any tree, then after each round
    train_losses: tuple = field(default=(), compare=False)
    train_predictions: np.ndarray | None = field(default=None, compare=False, repr=False)


def windowed_examples(closes, window):
    """Rows of ``window`` consecutive closes (oldest first) and the next close."""
    closes = np.asarray(closes, dtype=np.float64)
    n = len(closes) - window
    X = np.lib.stride_tricks.sliding_window_view(closes, window)[:n].copy()
    return X, closes[window:].copy()


def best_split(X, g, idx, l2, min_leaf):
    """Highest-gain ``(gain, feature, threshold, left_mask)`` for the rows ``idx``.

    Ties go to the lowest feature index, then the lowest threshold. Returns
    ``None`` when no admissible split has positive gain.
    """
    n = len(idx)
    if n < 2 * min_leaf:
        return None
    gn = g[idx]
    G = gn.sum()
    parent = G * G / (n + l2)
    best = None
    for j in range(X.shape[1]):
        vals = X[idx, j]
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        gl = np.cumsum(gn[order])[:-1]
        n_left = np.arange(1, n)
        ok = (sv[:-1] < sv[1:]) & (n_left >= min_leaf) & (n - n_left >= min_leaf)
        if not ok.any():
            continue
        gr = G - gl
        gain = gl * gl / (n_left + l2) + gr * gr / (n - n_left + l2) - parent
        gain = np.where(ok, gain, -np.inf)
        k = int(np.argmax(gain))
        if gain[k] > 0 and (best is None or gain[k] > best[0]):
            thr = 0.5 * (sv[k] + sv[k + 1])
            if not sv[k] < thr:
                thr = sv[k + 1]
            best = (float(gain[k]), j, float(thr))
    if best is None:
        return None
    gain, j, thr = best
    return gain, j, thr, X[idx, j] < thr


def build_tree(X, g, config: GbtConfig):
    """Grow one tree on gradients ``g`` (hessians are all 1).

    Returns the tree and, for bookkeeping, the leaf weight of every row.
    """
    feature, threshold, left, right, value = [], [], [], [], []
    row_weight = np.zeros(len(g))

    def new_node():
        for lst, v in ((feature, -1), (threshold, 0.0), (left, -1), (right, -1), (value, 0.0)):
            lst.append(v)
        return len(feature) - 1

    def grow(node, idx, depth):
        split = None
        if config.max_depth is None or depth < config.max_depth:
            split = best_split(X, g, idx, config.l2, config.min_leaf)
        if split is None:
            w = -g[idx].sum() / (len(idx) + config.l2)
            value[node] = w
            row_weight[idx] = w
            return
        _, j, thr, mask = split
        feature[node], threshold[node] = j, thr
        left[node] = new_node()
        right[node] = new_node()
        grow(left[node], idx[mask], depth + 1)
        grow(right[node], idx[~mask], depth + 1)

    grow(new_node(), np.arange(len(g)), 0)
    tree = RegressionTree(np.array(feature), np.array(threshold), np.array(left),
                          np.array(right), np.array(value))
    return tree, row_weight


def fit_examples(X, y, config: GbtConfig) -> GbtEnsemble:
    """Boost on an explicit design matrix (used directly by tests)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    base = float(np.mean(y))
    pred = np.full(len(y), base)
    losses = [float(np.mean((pred - y) ** 2))]
    trees = []
    for _ in range(config.rounds):
        tree, weights = build_tree(X, pred - y, config)
        trees.append(tree)
        pred = pred + config.shrinkage * weights
        losses.append(float(np.mean((pred - y) ** 2)))
    return GbtEnsemble(base, config.shrinkage, X.shape[1], tuple(trees), tuple(losses), pred)


def gbt_fit(train, config: GbtConfig = GbtConfig(), window=10) -> GbtEnsemble:
    closes = getattr(train, "closes", train)
    if len(closes) < window + 2:
        raise TooShortError(f"GBT with window {window} needs {window + 2} observations, "
                            f"got {len(closes)}")
    X, y = windowed_examples(closes, window)
    return fit_examples(X, y, config)


def gbt_predict(ensemble: GbtEnsemble, window) -> float:
    window = np.asarray(window, dtype=np.float64)
    if len(window) != ensemble.window:
        raise WrongWindowLengthError(f"expected a window of {ensemble.window}, got {len(window)}")
    total = 0.0
    for tree in ensemble.trees:
        total += tree.predict_one(window)
    return float(ensemble.base_score + ensemble.shrinkage * total)
