import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from div2vec.predictor import (
    HIDDEN,
    MlpModel,
    TrainConfig,
    auc,
    init_mlp,
    load_model,
    mlp_forward,
    mlp_loss_and_grads,
    train_classifier,
    write_scores_csv,
)


def zero_model(d):
    return MlpModel(np.zeros((HIDDEN, d)), np.zeros(HIDDEN), np.zeros(HIDDEN), 0.0)


def test_zero_parameters_give_half():
    m = zero_model(5)
    assert mlp_forward(m, np.arange(5.0)) == 0.5
    assert np.all(mlp_forward(m, np.random.default_rng(0).normal(size=(7, 5))) == 0.5)


def test_output_strictly_inside_unit_interval():
    m = init_mlp(4, seed=1)
    X = np.random.default_rng(1).normal(scale=3.0, size=(500, 4))
    p = mlp_forward(m, X)
    assert np.all(p > 0) and np.all(p < 1)


def test_shape_checks():
    with pytest.raises(ValueError):
        MlpModel(np.zeros((64, 3)), np.zeros(64), np.zeros(64), 0.0)
    with pytest.raises(ValueError, match="dimension"):
        mlp_forward(init_mlp(4), np.zeros(5))


def reference_loss(model, X, y):
    pre = X @ model.W1.T + model.b1
    h = np.maximum(pre, 0) if model.activation == "relu" else np.tanh(pre)
    z = h @ model.W2 + model.b2
    p = 1.0 / (1.0 + np.exp(-z))
    return float(np.mean(-(y * np.log(p) + (1 - y) * np.log(1 - p))))


@pytest.mark.parametrize("activation", ["relu", "tanh"])
def test_gradients_match_finite_differences(activation):
    rng = np.random.default_rng(3)
    X = rng.normal(size=(6, 3))
    y = np.array([1, 0, 1, 1, 0, 0], dtype=float)
    model = init_mlp(3, seed=3, activation=activation)
    model.b1 = rng.normal(scale=0.1, size=HIDDEN)
    model.b2 = 0.2
    loss, grads = mlp_loss_and_grads(model, X, y)
    assert loss == pytest.approx(reference_loss(model, X, y), rel=1e-12)
    h = 1e-6
    for name in ("W1", "b1", "W2"):
        param = getattr(model, name)
        fd = np.zeros_like(param)
        for idx in np.ndindex(param.shape):
            old = param[idx]
            param[idx] = old + h
            up = reference_loss(model, X, y)
            param[idx] = old - h
            down = reference_loss(model, X, y)
            param[idx] = old
            fd[idx] = (up - down) / (2 * h)
        err = np.linalg.norm(fd - grads[name]) / max(np.linalg.norm(fd), 1e-12)
        assert err < 1e-4, name
    b2 = model.b2
    model.b2 = b2 + h
    up = reference_loss(model, X, y)
    model.b2 = b2 - h
    down = reference_loss(model, X, y)
    assert abs((up - down) / (2 * h) - grads["b2"]) / abs(grads["b2"]) < 1e-4


def xor_data(seed, n=400):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1, 1, size=(n, 2))
    y = ((X[:, 0] > 0) ^ (X[:, 1] > 0)).astype(float)
    return X, y


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_xor_is_learned(seed):
    X, y = xor_data(seed)
    m = train_classifier(X, y, TrainConfig(epochs=300, batch_size=32, learning_rate=0.5, seed=seed))
    acc = np.mean((mlp_forward(m, X) > 0.5) == y)
    assert acc > 0.95


def test_separable_loss_below_tenth():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(300, 4))
    y = (X @ np.array([1.0, -2.0, 0.5, 1.0]) > 0).astype(float)
    m = train_classifier(X, y, TrainConfig())
    assert mlp_loss_and_grads(m, X, y)[0] < 0.1


def test_deterministic_and_duplicate_invariant():
    X, y = xor_data(5, n=60)
    cfg = TrainConfig(epochs=20, batch_size=60, seed=4)
    a = train_classifier(X, y, cfg)
    b = train_classifier(X, y, cfg)
    assert np.array_equal(a.W1, b.W1) and a.b2 == b.b2
    # doubled data, full batch: the mean-loss gradient is unchanged
    d = train_classifier(np.vstack([X, X]), np.concatenate([y, y]), TrainConfig(epochs=20, batch_size=120, seed=4))
    np.testing.assert_allclose(d.W1, a.W1, atol=1e-12)
    np.testing.assert_allclose(d.W2, a.W2, atol=1e-12)


def test_single_class_rejected():
    with pytest.raises(ValueError, match="both"):
        train_classifier(np.zeros((4, 2)), np.ones(4))


def test_model_file_roundtrip(tmp_path):
    m = init_mlp(7, seed=2, activation="tanh")
    m.b2 = -0.25
    from div2vec.predictor import save_model

    save_model(m, tmp_path / "m.mlp")
    assert (tmp_path / "m.mlp").read_bytes().startswith(b"mlp input_dim=7 hidden=128 activation=tanh")
    back = load_model(tmp_path / "m.mlp")
    assert np.array_equal(back.W1, m.W1) and np.array_equal(back.W2, m.W2) and back.b2 == m.b2
    assert back.activation == "tanh"


def test_scores_csv(tmp_path):
    write_scores_csv(tmp_path / "s.csv", [1, 2], [5, 6], [1, 0], [0.25, 0.5])
    assert (tmp_path / "s.csv").read_text() == "u,v,label,score\n1,5,1,0.25\n2,6,0,0.5\n"


# AUC --------------------------------------------------------------------------


def pair_auc(scores, labels):
    pos = [s for s, l in zip(scores, labels) if l]
    neg = [s for s, l in zip(scores, labels) if not l]
    total = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p, n in itertools.product(pos, neg))
    return total / (len(pos) * len(neg))


def test_auc_examples():
    assert auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0
    assert auc([0.9, 0.4, 0.6, 0.1], [1, 1, 0, 0]) == 0.75
    assert auc([0.3] * 6, [1, 0, 1, 0, 0, 1]) == 0.5


def test_auc_single_class():
    with pytest.raises(ValueError, match="both classes"):
        auc([0.1, 0.2], [1, 1])


labeled = st.lists(st.tuples(st.integers(0, 20).map(lambda x: x / 4), st.booleans()), min_size=2, max_size=200).filter(
    lambda r: 0 < sum(l for _, l in r) < len(r)
)


@given(labeled)
@settings(max_examples=200)
def test_auc_matches_pair_counting(rows):
    s, l = zip(*rows)
    assert auc(s, l) == pytest.approx(pair_auc(s, l), abs=1e-12)
    assert auc(s, l) + auc(s, [not x for x in l]) == pytest.approx(1.0, abs=1e-12)
    assert auc(np.exp(3 * np.array(s)) - 7, l) == auc(s, l)
