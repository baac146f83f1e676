import itertools

import numpy as np
import pytest

from stockbench.errors import TooShortError, WrongWindowLengthError
from stockbench.ingest import load_series
from stockbench.models import GbtConfig, GbtEnsemble, RegressionTree, gbt_fit, gbt_predict
from stockbench.models.gbt import best_split, fit_examples, windowed_examples
from stockbench.series import split_at

from .conftest import STANDIN_DIR


def brute_split(X, g, l2, min_leaf):
    """Enumerate every (feature, threshold) pair with explicit loops."""
    n = len(g)
    G = sum(g)
    best = None
    for j in range(X.shape[1]):
        values = sorted(set(X[:, j].tolist()))
        for a, b in zip(values, values[1:]):
            thr = (a + b) / 2
            left = [i for i in range(n) if X[i, j] < thr]
            right = [i for i in range(n) if not X[i, j] < thr]
            if len(left) < min_leaf or len(right) < min_leaf:
                continue
            gl = sum(g[i] for i in left)
            gr = G - gl
            gain = gl ** 2 / (len(left) + l2) + gr ** 2 / (len(right) + l2) - G ** 2 / (n + l2)
            if gain > 0 and (best is None or gain > best[0] + 1e-12):
                best = (gain, j, thr)
    return best


@pytest.mark.parametrize("seed", range(8))
def test_split_search_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 6, size=(25, 3)).astype(float)
    g = rng.standard_normal(25)
    got = best_split(X, g, np.arange(25), l2=1.0, min_leaf=2)
    want = brute_split(X, g, 1.0, 2)
    if want is None:
        assert got is None
    else:
        assert got[0] == pytest.approx(want[0], rel=1e-12)
        assert (got[1], got[2]) == (want[1], want[2])


def test_tie_breaking_prefers_lowest_feature_then_threshold():
    X = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
    g = np.array([-1.0, -1.0, 1.0, 1.0])
    _, j, thr, _ = best_split(X, g, np.arange(4), l2=0.0, min_leaf=1)
    assert (j, thr) == (0, 1.5)


def test_constant_targets():
    X = np.arange(40, dtype=float).reshape(20, 2)
    ens = fit_examples(X, np.full(20, 5.0), GbtConfig(rounds=5))
    assert ens.base_score == 5.0
    assert all(t.n_leaves == 1 for t in ens.trees)
    for row in np.random.default_rng(0).uniform(-100, 100, (10, 2)):
        assert gbt_predict(ens, row) == 5.0


def test_four_points_fit_exactly():
    X = np.array([[3.0], [1.0], [4.0], [2.0]])
    y = np.array([10.0, -2.0, 7.5, 0.25])
    ens = fit_examples(X, y, GbtConfig(rounds=1, max_depth=None, shrinkage=1.0, l2=0.0, min_leaf=1))
    mse = np.mean([(gbt_predict(ens, x) - t) ** 2 for x, t in zip(X, y)])
    assert mse < 1e-18


def test_predict_examples():
    assert gbt_predict(GbtEnsemble(3.0, 0.1, 2), [1.0, 2.0]) == 3.0
    leaf = RegressionTree(np.array([-1]), np.array([0.0]), np.array([-1]), np.array([-1]),
                          np.array([4.0]))
    assert gbt_predict(GbtEnsemble(3.0, 0.1, 2, (leaf,)), [1.0, 2.0]) == pytest.approx(3.4)
    with pytest.raises(WrongWindowLengthError):
        gbt_predict(GbtEnsemble(3.0, 0.1, 2), [1.0])


def test_too_short():
    with pytest.raises(TooShortError):
        gbt_fit(np.arange(1.0, 12.0), window=10)


@pytest.fixture(scope="module")
def msft_ensemble():
    train = split_at(load_series(STANDIN_DIR / "MSFT.csv"), "2020-01-01").train
    return train, gbt_fit(train, GbtConfig())


def test_bookkeeping_matches_predict(msft_ensemble):
    train, ens = msft_ensemble
    X, _ = windowed_examples(train.closes, 10)
    for i in range(0, len(X), 37):
        assert gbt_predict(ens, X[i]) == pytest.approx(ens.train_predictions[i], abs=1e-9)


def test_structure(msft_ensemble):
    _, ens = msft_ensemble
    assert len(ens.trees) == 100
    for tree in ens.trees:
        assert tree.depth <= 3
        assert np.all(tree.feature < 10)
        # every node is either a leaf or has two children; every child has one parent
        children = [c for c in itertools.chain(tree.left, tree.right) if c >= 0]
        assert sorted(children) == list(range(1, len(tree.feature)))


def test_loss_non_increasing(msft_ensemble):
    _, ens = msft_ensemble
    losses = np.array(ens.train_losses)
    assert np.all(losses[1:] <= losses[:-1] * (1 + 1e-12))
    assert losses[-1] < losses[0]


def test_deterministic(msft_ensemble):
    train, ens = msft_ensemble
    again = gbt_fit(train, GbtConfig())
    assert again.train_losses == ens.train_losses
    w = train.closes[-10:]
    assert gbt_predict(again, w) == gbt_predict(ens, w)
