"""Classifier identity and a one-hidden-layer MLP trained by mini-batch SGD.

The structural identity of a classifier is the triple (output activation,
hidden nodes, learning rate).  The network is

    y = f_outer(W2 @ [1, tanh(W1 @ [1, x])])

with the bias stored in column 0 of each weight matrix.  The ``softmax``
head has two output units and reports the class-1 component; the other
heads have a single output unit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

ACTIVATIONS = ("linear", "logistic", "softmax")
HIDDEN_NODES = tuple(range(7, 22))
LEARNING_RATES = (0.01, 0.02, 0.03, 0.04, 0.05)

DEFAULT_EPOCHS = 100
DEFAULT_BATCH_SIZE = 32


@dataclass(frozen=True, order=True)
class ClassifierConfig:
    activation: str
    hidden_nodes: int
    learning_rate: float

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if isinstance(self.hidden_nodes, bool) or self.hidden_nodes not in HIDDEN_NODES:
            raise ValueError(f"hidden_nodes must be in [7, 21], got {self.hidden_nodes}")
        for lr in LEARNING_RATES:
            if math.isclose(self.learning_rate, lr, rel_tol=0, abs_tol=1e-12):
                object.__setattr__(self, "learning_rate", lr)
                break
        else:
            raise ValueError(f"learning_rate must be one of {LEARNING_RATES}")

    @property
    def n_outputs(self) -> int:
        return 2 if self.activation == "softmax" else 1


def species_key(config: ClassifierConfig) -> str:
    """Canonical text key, e.g. ``"logistic:7:0.01"``."""
    return f"{config.activation}:{config.hidden_nodes}:{config.learning_rate:g}"


def parse_species_key(key: str) -> ClassifierConfig:
    activation, hidden, lr = key.split(":")
    return ClassifierConfig(activation, int(hidden), float(lr))


def config_grid() -> list[ClassifierConfig]:
    """All 3 x 15 x 5 = 225 admissible configurations, in a fixed order."""
    return [
        ClassifierConfig(a, h, lr)
        for a, h, lr in itertools.product(ACTIVATIONS, HIDDEN_NODES, LEARNING_RATES)
    ]


@dataclass
class TrainedClassifier:
    config: ClassifierConfig
    weights_hidden: np.ndarray  # (hidden_nodes, input_dim + 1)
    weights_output: np.ndarray  # (n_outputs, hidden_nodes + 1)
    input_dim: int
    seed: int
    epochs_trained: int = 0
    loss_history: list[float] = field(default_factory=list)
    train_accuracy: Optional[float] = None

    def __post_init__(self):
        h, d = self.config.hidden_nodes, self.input_dim
        if self.weights_hidden.shape != (h, d + 1):
            raise ValueError(f"weights_hidden shape {self.weights_hidden.shape} != {(h, d + 1)}")
        if self.weights_output.shape != (self.config.n_outputs, h + 1):
            raise ValueError(
                f"weights_output shape {self.weights_output.shape} "
                f"!= {(self.config.n_outputs, h + 1)}"
            )
        if not (np.all(np.isfinite(self.weights_hidden)) and np.all(np.isfinite(self.weights_output))):
            raise ValueError("non-finite weights")

    def to_dict(self) -> dict:
        return {
            "config": {
                "activation": self.config.activation,
                "hidden_nodes": self.config.hidden_nodes,
                "learning_rate": self.config.learning_rate,
            },
            "species_key": species_key(self.config),
            "input_dim": self.input_dim,
            "seed": self.seed,
            "epochs_trained": self.epochs_trained,
            "train_accuracy": self.train_accuracy,
            "loss_history": list(self.loss_history),
            "weights_hidden": _array_doc(self.weights_hidden),
            "weights_output": _array_doc(self.weights_output),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainedClassifier":
        return cls(
            config=ClassifierConfig(**doc["config"]),
            weights_hidden=_array_from_doc(doc["weights_hidden"]),
            weights_output=_array_from_doc(doc["weights_output"]),
            input_dim=int(doc["input_dim"]),
            seed=int(doc["seed"]),
            epochs_trained=int(doc.get("epochs_trained", 0)),
            loss_history=[float(v) for v in doc.get("loss_history", [])],
            train_accuracy=doc.get("train_accuracy"),
        )


def _array_doc(a: np.ndarray) -> dict:
    return {"shape": list(a.shape), "data": [float(v) for v in a.ravel(order="C")]}


def _array_from_doc(doc: dict) -> np.ndarray:
    return np.asarray(doc["data"], dtype=float).reshape(doc["shape"], order="C")


def init_classifier(config: ClassifierConfig, input_dim: int, seed: int) -> TrainedClassifier:
    """Fresh network with N(0, 1/fan_in) weights, deterministic in ``seed``."""
    if input_dim < 1:
        raise ValueError("input_dim must be >= 1")
    rng = np.random.default_rng(seed)
    h = config.hidden_nodes
    w1 = rng.normal(0.0, 1.0 / math.sqrt(input_dim + 1), size=(h, input_dim + 1))
    w2 = rng.normal(0.0, 1.0 / math.sqrt(h + 1), size=(config.n_outputs, h + 1))
    return TrainedClassifier(config, w1, w2, input_dim, seed)


def _with_bias(a: np.ndarray) -> np.ndarray:
    return np.hstack([np.ones((a.shape[0], 1)), a])


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _hidden(w1: np.ndarray, X: np.ndarray):
    xa = _with_bias(X)
    h = np.tanh(xa @ w1.T)
    return xa, _with_bias(h)


def _logits(clf: TrainedClassifier, X: np.ndarray):
    xa, ha = _hidden(clf.weights_hidden, X)
    return xa, ha, ha @ clf.weights_output.T


def _as_matrix(clf: TrainedClassifier, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != clf.input_dim:
        raise ValueError(f"expected {clf.input_dim} features, got shape {X.shape}")
    return X


def predict_proba(clf: TrainedClassifier, X) -> np.ndarray:
    """Class-1 probability for each row of ``X``, always within [0, 1]."""
    _, _, z = _logits(clf, _as_matrix(clf, X))
    act = clf.config.activation
    if act == "logistic":
        return _sigmoid(z[:, 0])
    if act == "softmax":
        # two-unit softmax, class-1 component
        return _sigmoid(z[:, 1] - z[:, 0])
    return np.clip(z[:, 0], 0.0, 1.0)


def forward(clf: TrainedClassifier, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("forward expects a single feature vector")
    return float(predict_proba(clf, x)[0])


def predict(clf: TrainedClassifier, X) -> np.ndarray:
    return (predict_proba(clf, X) >= 0.5).astype(np.int8)


def _head_loss(act: str, z: np.ndarray, t: np.ndarray):
    """Per-sample loss and its gradient w.r.t. the output logits."""
    if act == "logistic":
        z0 = z[:, 0]
        loss = np.logaddexp(0.0, z0) - t * z0
        dz = (_sigmoid(z0) - t)[:, None]
    elif act == "softmax":
        zmax = z.max(axis=1, keepdims=True)
        lse = zmax[:, 0] + np.log(np.exp(z - zmax).sum(axis=1))
        onehot = np.stack([1.0 - t, t], axis=1)
        loss = lse - (z * onehot).sum(axis=1)
        dz = np.exp(z - lse[:, None]) - onehot
    else:
        r = z[:, 0] - t
        loss = 0.5 * r * r
        dz = r[:, None]
    return loss, dz


def loss_and_grads(clf: TrainedClassifier, X, y):
    """Mean loss over the batch and its gradients w.r.t. both weight matrices.

    Cross-entropy for the logistic and softmax heads, half squared error on the
    unclamped output for the linear head.
    """
    X = _as_matrix(clf, X)
    t = np.asarray(y, dtype=float).reshape(-1)
    n = X.shape[0]
    xa, ha, z = _logits(clf, X)
    loss, dz = _head_loss(clf.config.activation, z, t)
    dw2 = dz.T @ ha / n
    dh = (dz @ clf.weights_output[:, 1:]) * (1.0 - ha[:, 1:] ** 2)
    dw1 = dh.T @ xa / n
    return float(loss.mean()), dw1, dw2


def gradient_check(clf: TrainedClassifier, x, y, h: float = 1e-5) -> float:
    """Largest relative gap between backprop and central finite differences."""
    X = _as_matrix(clf, x)
    t = np.array([float(y)])
    _, dw1, dw2 = loss_and_grads(clf, X, t)

    def loss():
        return float(_head_loss(clf.config.activation, _logits(clf, X)[2], t)[0][0])

    worst = 0.0
    for w, g in ((clf.weights_hidden, dw1), (clf.weights_output, dw2)):
        for idx in np.ndindex(w.shape):
            orig = w[idx]
            w[idx] = orig + h
            lp = loss()
            w[idx] = orig - h
            lm = loss()
            w[idx] = orig
            num = (lp - lm) / (2 * h)
            worst = max(worst, abs(g[idx] - num) / max(1.0, abs(g[idx])))
    return worst


def train(
    clf: TrainedClassifier,
    X,
    y,
    epochs: int = DEFAULT_EPOCHS,
    batch_size: int = DEFAULT_BATCH_SIZE,
    learning_rate: Optional[float] = None,
) -> TrainedClassifier:
    """Mini-batch SGD; returns a new classifier, ``clf`` is left untouched.

    Sample order is shuffled each epoch from a generator seeded by the
    classifier's seed and its epoch count, so repeated calls are reproducible.
    ``learning_rate`` overrides the configured rate.
    """
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    X = _as_matrix(clf, X)
    y = np.asarray(y, dtype=float).reshape(-1)
    if X.shape[0] == 0:
        raise ValueError("empty training split")
    if X.shape[0] != y.shape[0]:
        raise ValueError("features and labels differ in length")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be binary")
    lr = clf.config.learning_rate if learning_rate is None else learning_rate

    out = replace(
        clf,
        weights_hidden=clf.weights_hidden.copy(),
        weights_output=clf.weights_output.copy(),
        loss_history=list(clf.loss_history),
    )
    rng = np.random.default_rng([clf.seed, clf.epochs_trained])
    n = X.shape[0]
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start:start + batch_size]
            _, dw1, dw2 = loss_and_grads(out, X[batch], y[batch])
            out.weights_hidden -= lr * dw1
            out.weights_output -= lr * dw2
        out.loss_history.append(loss_and_grads(out, X, y)[0])
    out.epochs_trained = clf.epochs_trained + epochs
    out.train_accuracy = float(np.mean(predict(out, X) == y))
    return out
