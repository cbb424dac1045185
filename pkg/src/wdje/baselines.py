"""Analytical transferability baselines: LEEP, NCE, LogME, H-score.

All four score a target task from source-model outputs or raw features
without any target training, which makes them the natural comparison
points for the bound-based score.  Pearson correlation lives here too
since it is how all metrics get compared against empirical loss.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class SourcePredictions:
    """Source-model softmax outputs over the source classes for each
    target sample; rows sum to one."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 2 or probs.shape[0] == 0:
            raise ValidationError("probs must be a nonempty 2-D matrix")
        if np.any(probs < 0):
            raise ValidationError("negative probability")
        rows = probs.sum(axis=1)
        if np.any(np.abs(rows - 1.0) > 1e-9):
            i = int(np.argmax(np.abs(rows - 1.0)))
            raise ValidationError(f"row {i} sums to {rows[i]!r}, expected 1")
        probs = np.ascontiguousarray(probs)
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    @property
    def pseudo_labels(self) -> np.ndarray:
        return np.argmax(self.probs, axis=1)


def leep(preds: SourcePredictions, y, C: int) -> float:
    """Log expected empirical prediction score (always <= 0).

    Forms the empirical joint of target labels and source-class soft
    assignments, conditions it on the source class, and scores the target
    labels under the resulting mixture predictor.
    """
    y = np.asarray(y, dtype=np.int64)
    probs = preds.probs
    if len(y) != probs.shape[0]:
        raise ValidationError("predictions and labels must be row-aligned")
    if len(y) == 0:
        raise ValidationError("empty input")
    if C < 2 or np.any((y < 0) | (y >= C)):
        raise ValidationError(f"labels must lie in [0, {C - 1}]")
    n = len(y)
    joint = np.zeros((C, probs.shape[1]))
    np.add.at(joint, y, probs)
    joint /= n
    pz = joint.sum(axis=0)
    keep = pz > 0
    cond = joint[:, keep] / pz[keep]
    scores = np.sum(cond[y] * probs[:, keep], axis=1)
    return float(np.mean(np.log(scores)))


def nce(z, y) -> float:
    """Negative conditional entropy -H(Y|Z) of target labels given source
    pseudo-labels (always <= 0)."""
    z = np.asarray(z, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if len(z) != len(y):
        raise ValidationError("label vectors must have equal length")
    if len(z) == 0:
        raise ValidationError("empty input")
    n = len(z)
    z_vals, z_idx = np.unique(z, return_inverse=True)
    y_vals, y_idx = np.unique(y, return_inverse=True)
    joint = np.zeros((len(y_vals), len(z_vals)))
    np.add.at(joint, (y_idx, z_idx), 1.0)
    joint /= n
    pz = joint.sum(axis=0)
    mask = joint > 0
    ratio = joint[mask] / pz[np.nonzero(mask)[1]]
    return float(np.sum(joint[mask] * np.log(ratio)))


def _evidence_terms(s2, z2, res2, n, D, alpha, beta):
    # log evidence of Bayesian linear regression in the SVD basis
    denom = alpha + beta * s2
    fit = float(np.sum(alpha**2 * z2 / denom**2) + res2)
    m2 = float(np.sum(beta**2 * s2 * z2 / denom**2))
    logdet = float(np.sum(np.log(denom))) + (D - len(s2)) * np.log(alpha)
    ev = (
        0.5 * D * np.log(alpha)
        + 0.5 * n * np.log(beta)
        - 0.5 * n * np.log(2 * np.pi)
        - 0.5 * beta * fit
        - 0.5 * alpha * m2
        - 0.5 * logdet
    )
    return ev, fit, m2


# precision search box; on exactly-interpolable data the evidence is
# unbounded in beta, so the fixed point is confined to the same box a
# grid search would cover
PRECISION_MIN = 1e-6
PRECISION_MAX = 1e6


def _logme_single(s, z, res2, n, D, tol=1e-6, max_iter=100):
    s2 = s**2
    z2 = z**2
    alpha, beta = 1.0, 1.0
    ev, fit, m2 = _evidence_terms(s2, z2, res2, n, D, alpha, beta)
    converged = False
    for _ in range(max_iter):
        gamma = float(np.sum(beta * s2 / (alpha + beta * s2)))
        if m2 <= 0 or fit <= 0:
            break
        alpha = min(max(gamma / m2, PRECISION_MIN), PRECISION_MAX)
        beta = min(max((n - gamma) / fit, PRECISION_MIN), PRECISION_MAX)
        new_ev, fit, m2 = _evidence_terms(s2, z2, res2, n, D, alpha, beta)
        if abs(new_ev - ev) <= tol:
            ev = new_ev
            converged = True
            break
        ev = new_ev
    return ev, converged


def logme(F, y, task_kind: str = "regression") -> float:
    """Maximized Bayesian log-evidence of labels given features, per sample.

    Classification expands labels one-vs-rest and averages; regression
    uses the values directly.  Evidence is maximized over the prior and
    noise precisions by the standard fixed-point iteration on the SVD of
    the feature matrix (tolerance 1e-6 on the evidence, 100 iterations),
    with both precisions confined to [1e-6, 1e6].
    """
    F = np.asarray(F, dtype=np.float64)
    if F.ndim != 2 or F.shape[0] < 2:
        raise ValidationError("need a 2-D feature matrix with n >= 2")
    n, D = F.shape
    if task_kind == "classification":
        labels = np.asarray(y, dtype=np.int64)
        classes = np.unique(labels)
        targets = [(labels == c).astype(np.float64) for c in classes]
    else:
        target = np.asarray(y, dtype=np.float64).ravel()
        if np.ptp(target) == 0:
            raise ValidationError("regression labels are all equal")
        targets = [target]
    if len(targets[0]) != n:
        raise ValidationError("features and labels must be row-aligned")

    U, s, _ = np.linalg.svd(F, full_matrices=False)
    values = []
    any_nonconverged = False
    for t in targets:
        z = U.T @ t
        res2 = max(float(t @ t - z @ z), 0.0)
        ev, converged = _logme_single(s, z, res2, n, D)
        any_nonconverged |= not converged
        values.append(ev / n)
    if any_nonconverged:
        warnings.warn("LogME fixed point did not converge; returning last value",
                      stacklevel=2)
    return float(np.mean(values))


def hscore(F, y) -> float:
    """Between-class over total feature covariance trace (>= 0).

    Uses a pseudo-inverse with relative singular-value cutoff 1e-10 so
    rank-deficient covariances from small samples stay finite.
    """
    F = np.asarray(F, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if F.ndim != 2 or len(y) != F.shape[0]:
        raise ValidationError("features and labels must be row-aligned")
    classes = np.unique(y)
    if len(classes) < 2:
        raise ValidationError("need at least two classes")
    n = F.shape[0]
    if n < len(classes):
        raise ValidationError(f"need n >= {len(classes)} samples")
    Fc = F - F.mean(axis=0)
    cov = Fc.T @ Fc / n
    between = np.zeros_like(cov)
    for c in classes:
        mask = y == c
        mu = Fc[mask].mean(axis=0)
        between += (mask.sum() / n) * np.outer(mu, mu)
    return float(np.trace(np.linalg.pinv(cov, rcond=1e-10) @ between))


def pearson(a, b) -> float:
    """Sample Pearson correlation in [-1, 1]."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if len(a) != len(b):
        raise ValidationError("vectors must have equal length")
    if len(a) < 3:
        raise ValidationError("need at least 3 points")
    da = a - a.mean()
    db = b - b.mean()
    va = float(da @ da)
    vb = float(db @ db)
    if va == 0 or vb == 0:
        raise ValidationError("zero-variance input, correlation undefined")
    r = float(da @ db) / np.sqrt(va * vb)
    return float(min(1.0, max(-1.0, r)))
