"""Link-prediction classifier (one hidden layer of 128 units) and rank-based AUC."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

HIDDEN = 128
_ACTIVATIONS = ("relu", "tanh")


@dataclass
class MlpModel:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: float
    activation: str = "relu"

    def __post_init__(self):
        if self.W1.shape[0] != HIDDEN or self.b1.shape != (HIDDEN,) or self.W2.shape != (HIDDEN,):
            raise ValueError(f"hidden layer must have exactly {HIDDEN} units")
        if self.activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")

    @property
    def input_dim(self) -> int:
        return self.W1.shape[1]

    def copy(self) -> "MlpModel":
        return MlpModel(self.W1.copy(), self.b1.copy(), self.W2.copy(), float(self.b2), self.activation)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    batch_size: int = 256
    learning_rate: float = 0.5
    seed: int = 0
    activation: str = "relu"

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1 or not self.learning_rate > 0:
            raise ValueError("epochs, batch_size and learning_rate must be positive")


def init_mlp(input_dim: int, seed: int = 0, activation: str = "relu") -> MlpModel:
    """He-uniform first layer, small uniform output layer, zero biases."""
    rng = np.random.default_rng(seed)
    lim1 = np.sqrt(6.0 / input_dim)
    lim2 = np.sqrt(6.0 / (HIDDEN + 1))
    return MlpModel(
        rng.uniform(-lim1, lim1, (HIDDEN, input_dim)),
        np.zeros(HIDDEN),
        rng.uniform(-lim2, lim2, HIDDEN),
        0.0,
        activation,
    )


def _hidden(model, X):
    pre = X @ model.W1.T + model.b1
    if model.activation == "relu":
        return pre, np.maximum(pre, 0.0)
    return pre, np.tanh(pre)


def _logit(model, X):
    X = np.asarray(X, dtype=np.float64)
    if X.shape[-1] != model.input_dim:
        raise ValueError(f"feature dimension {X.shape[-1]} does not match model input {model.input_dim}")
    pre, h = _hidden(model, X)
    return pre, h, h @ model.W2 + model.b2


def mlp_forward(model: MlpModel, features) -> np.ndarray:
    """Probability of the positive class for one feature vector or a batch."""
    _, _, z = _logit(model, features)
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def mlp_loss_and_grads(model: MlpModel, X, y):
    """Mean binary cross-entropy over the batch and its gradient per parameter."""
    y = np.asarray(y, dtype=np.float64)
    pre, h, z = _logit(model, X)
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z))
    dz = (0.5 * (1.0 + np.tanh(0.5 * z)) - y) / y.shape[0]
    dh = np.outer(dz, model.W2)
    if model.activation == "relu":
        dpre = dh * (pre > 0)
    else:
        dpre = dh * (1.0 - h * h)
    grads = {
        "W1": dpre.T @ np.asarray(X, dtype=np.float64),
        "b1": dpre.sum(axis=0),
        "W2": h.T @ dz,
        "b2": float(dz.sum()),
    }
    return loss, grads


def train_classifier(X, y, config: TrainConfig = TrainConfig()) -> MlpModel:
    """Mini-batch gradient descent with a fixed rate and a fixed number of epochs.

    Raises:
        ValueError: if ``y`` does not contain both classes.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError("X must be 2-d with one row per label")
    if np.unique(y).shape[0] < 2:
        raise ValueError("training data must contain both positive and negative labels")
    model = init_mlp(X.shape[1], config.seed, config.activation)
    rng = np.random.default_rng(config.seed + 1)
    lr = config.learning_rate
    n = X.shape[0]
    for _ in range(config.epochs):
        order = rng.permutation(n) if config.batch_size < n else np.arange(n)
        for lo in range(0, n, config.batch_size):
            idx = order[lo : lo + config.batch_size]
            _, g = mlp_loss_and_grads(model, X[idx], y[idx])
            model.W1 -= lr * g["W1"]
            model.b1 -= lr * g["b1"]
            model.W2 -= lr * g["W2"]
            model.b2 -= lr * g["b2"]
    if not all(np.all(np.isfinite(a)) for a in (model.W1, model.b1, model.W2, model.b2)):
        raise FloatingPointError("classifier training diverged")
    return model


def auc(scores, labels) -> float:
    """Probability that a random positive outscores a random negative, ties counted 1/2.

    Computed from mid-ranks (Mann-Whitney U).
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    n_pos = int(labels.sum())
    n_neg = labels.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError(f"AUC needs both classes (got {n_pos} positive, {n_neg} negative)")
    ranks = rankdata(scores, method="average")
    u = ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


# --------------------------------------------------------------------------
# files


def save_model(model: MlpModel, path) -> None:
    """Text header line, then W1, b1, W2, b2 as little-endian float64."""
    with open(path, "wb") as fh:
        fh.write(
            f"mlp input_dim={model.input_dim} hidden={HIDDEN} activation={model.activation} dtype=<f8\n".encode()
        )
        for a in (model.W1, model.b1, model.W2, np.array([model.b2])):
            fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def load_model(path) -> MlpModel:
    with open(path, "rb") as fh:
        header = fh.readline().decode().split()
        if not header or header[0] != "mlp":
            raise ValueError(f"{path}: not a model file")
        meta = dict(kv.split("=") for kv in header[1:])
        d, h = int(meta["input_dim"]), int(meta["hidden"])
        flat = np.frombuffer(fh.read(), dtype="<f8").astype(np.float64)
    if flat.shape[0] != h * d + 2 * h + 1:
        raise ValueError(f"{path}: truncated parameters")
    return MlpModel(
        flat[: h * d].reshape(h, d).copy(),
        flat[h * d : h * d + h].copy(),
        flat[h * d + h : h * d + 2 * h].copy(),
        float(flat[-1]),
        meta["activation"],
    )


def write_scores_csv(path, us, vs, labels, scores) -> None:
    with open(path, "w") as fh:
        fh.write("u,v,label,score\n")
        for u, v, lab, s in zip(us, vs, labels, scores):
            fh.write(f"{u},{v},{int(lab)},{float(s)!r}\n")
