"""Linear training baselines producing empirical risks.

A multinomial logistic model (full-batch gradient descent, zero-initialized)
stands in for a re-trained classification head, and ridge regression
(closed form) for a regression head.  Transfer fits on the source first
and continues gradient descent on the labelled target rows.  All risks are
training risks under the bound's loss unless the caller splits the data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericalError, ValidationError
from ..measures import CLASSIFICATION, Dataset

MULTINOMIAL_LOGISTIC = "multinomial_logistic"
RIDGE = "ridge"


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.5
    epochs: int = 200
    l2: float = 1e-4
    finetune_epochs: int = 40
    finetune_learning_rate: float | None = None

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be > 0")
        if self.epochs < 0 or self.finetune_epochs < 0:
            raise ValidationError("epoch counts must be >= 0")
        if self.l2 < 0:
            raise ValidationError("l2 must be >= 0")

    @property
    def finetune_lr(self) -> float:
        return self.finetune_learning_rate or self.learning_rate


def _augment(X: np.ndarray) -> np.ndarray:
    return np.hstack([X, np.ones((X.shape[0], 1))])


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _check_finite(loss: float):
    if not np.isfinite(loss):
        raise NumericalError("training diverged (NaN loss); lower learning_rate")


def logistic_risk(W: np.ndarray, X: np.ndarray, y: np.ndarray) -> float:
    """Mean cross-entropy of the model on (X, y); no penalty term."""
    probs = _softmax(_augment(X) @ W)
    return float(-np.mean(np.log(np.maximum(probs[np.arange(len(y)), y], 1e-300))))


def logistic_accuracy(W: np.ndarray, X: np.ndarray, y: np.ndarray) -> float:
    pred = np.argmax(_augment(X) @ W, axis=1)
    return float(np.mean(pred == y))


def logistic_proba(W: np.ndarray, X: np.ndarray) -> np.ndarray:
    return _softmax(_augment(X) @ W)


def _logistic_gd(W, X, y, classes, lr, epochs, l2):
    Xa = _augment(X)
    n = len(y)
    onehot = np.zeros((n, classes))
    onehot[np.arange(n), y] = 1.0
    for _ in range(epochs):
        probs = _softmax(Xa @ W)
        grad = Xa.T @ (probs - onehot) / n
        grad[:-1] += l2 * W[:-1]  # bias row unpenalized
        W = W - lr * grad
        _check_finite(float(np.abs(W).max()))
    return W


def ridge_risk(w: np.ndarray, X: np.ndarray, y: np.ndarray) -> float:
    """Mean squared error on (X, y); no penalty term."""
    resid = _augment(X) @ w - y
    return float(np.mean(resid**2))


def _ridge_solve(X, y, l2):
    Xa = _augment(X)
    if l2 == 0:
        w, *_ = np.linalg.lstsq(Xa, y, rcond=None)
        return w
    penalty = l2 * np.eye(Xa.shape[1])
    penalty[-1, -1] = 0.0  # bias unpenalized
    return np.linalg.solve(Xa.T @ Xa / len(y) + penalty, Xa.T @ y / len(y))


def _ridge_gd(w, X, y, lr, epochs, l2):
    Xa = _augment(X)
    n = len(y)
    for _ in range(epochs):
        grad = 2.0 * Xa.T @ (Xa @ w - y) / n
        grad[:-1] += 2.0 * l2 * w[:-1]
        w = w - lr * grad
        _check_finite(float(np.abs(w).max()))
    return w


def _model_for(dataset: Dataset, model: str | None) -> str:
    if model is not None:
        if model not in (MULTINOMIAL_LOGISTIC, RIDGE):
            raise ValidationError(f"unknown model {model!r}")
        return model
    return MULTINOMIAL_LOGISTIC if dataset.task_kind == CLASSIFICATION else RIDGE


def train_target_baseline(
    target: Dataset,
    model: str | None = None,
    hyper: TrainConfig | None = None,
) -> tuple[float, np.ndarray]:
    """Fit from scratch on the target rows; returns (risk_without, params)."""
    if not target.has_labels:
        raise ValidationError("target baseline requires labels")
    hyper = hyper or TrainConfig()
    kind = _model_for(target, model)
    if kind == MULTINOMIAL_LOGISTIC:
        if target.task_kind != CLASSIFICATION:
            raise ValidationError("multinomial_logistic needs a classification task")
        C = target.class_count
        W = np.zeros((target.n_features + 1, C))
        W = _logistic_gd(W, target.features, target.labels, C,
                         hyper.learning_rate, hyper.epochs, hyper.l2)
        return logistic_risk(W, target.features, target.labels), W
    w = _ridge_solve(target.features, target.labels, hyper.l2)
    return ridge_risk(w, target.features, target.labels), w


def _fit_transfer(
    source: Dataset,
    target: Dataset,
    model: str | None = None,
    hyper: TrainConfig | None = None,
) -> tuple[float, float, np.ndarray, np.ndarray]:
    if not source.has_labels or not target.has_labels:
        raise ValidationError("transfer baseline requires labels on both domains")
    if source.n_features != target.n_features:
        raise ValidationError(
            f"feature dims differ: {source.n_features} vs {target.n_features}"
        )
    hyper = hyper or TrainConfig()
    kind = _model_for(source, model)
    if kind == MULTINOMIAL_LOGISTIC:
        if source.class_count != target.class_count:
            raise ValidationError(
                f"label spaces differ: {source.class_count} vs {target.class_count} classes"
            )
        C = source.class_count
        W0 = np.zeros((source.n_features + 1, C))
        Ws = _logistic_gd(W0, source.features, source.labels, C,
                          hyper.learning_rate, hyper.epochs, hyper.l2)
        source_risk = logistic_risk(Ws, source.features, source.labels)
        Wt = _logistic_gd(Ws.copy(), target.features, target.labels, C,
                          hyper.finetune_lr, hyper.finetune_epochs, hyper.l2)
        return logistic_risk(Wt, target.features, target.labels), source_risk, Wt, Ws
    ws = _ridge_solve(source.features, source.labels, hyper.l2)
    source_risk = ridge_risk(ws, source.features, source.labels)
    wt = _ridge_gd(ws.copy(), target.features, target.labels,
                   hyper.finetune_lr, hyper.finetune_epochs, hyper.l2)
    return ridge_risk(wt, target.features, target.labels), source_risk, wt, ws


def train_transfer_baseline(
    source: Dataset,
    target: Dataset,
    model: str | None = None,
    hyper: TrainConfig | None = None,
) -> tuple[float, float]:
    """Fit on source, continue on target; returns (risk_with, source_risk).

    ``source_risk`` is the post-source-fit training risk on the source,
    ``risk_with`` the target training risk after the continuation phase.
    """
    risk_with, source_risk, _, _ = _fit_transfer(source, target, model, hyper)
    return risk_with, source_risk
