"""Synthetic source/target task pairs for desk-scale experiments.

Classification pairs are Gaussian class clusters with unit-spaced centers;
regression pairs follow a shared linear labelling function.  The target
domain gets its inputs translated (domain difference) and its labelling
permuted or shifted (task difference).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..measures import CLASSIFICATION, Dataset, REGRESSION


@dataclass(frozen=True)
class SyntheticConfig:
    task_kind: str = CLASSIFICATION
    classes: int = 4
    feature_dim: int = 8
    samples_per_domain: int = 120
    mean_shift: float = 0.0
    label_shift: object = None  # class permutation (sequence) or additive output shift (float)
    noise_sigma: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.task_kind not in (CLASSIFICATION, REGRESSION):
            raise ValidationError(f"unknown task_kind {self.task_kind!r}")
        if self.classes < 2 or self.feature_dim < 1 or self.samples_per_domain < 1:
            raise ValidationError("counts must be >= 1 (classes >= 2)")
        if self.noise_sigma <= 0:
            raise ValidationError("noise_sigma must be > 0")
        if self.mean_shift < 0:
            raise ValidationError("mean_shift must be >= 0")
        if self.label_shift is not None and self.task_kind == CLASSIFICATION:
            perm = tuple(int(v) for v in np.asarray(self.label_shift).ravel())
            if sorted(perm) != list(range(self.classes)):
                raise ValidationError(
                    f"label_shift must be a permutation of 0..{self.classes - 1}"
                )
            object.__setattr__(self, "label_shift", perm)


def _shift_direction(dim: int) -> np.ndarray:
    # shift along the second axis keeps the class geometry (axis 0) intact
    direction = np.zeros(dim)
    direction[1 if dim >= 2 else 0] = 1.0
    return direction


def _balanced_labels(n: int, classes: int) -> np.ndarray:
    reps = np.arange(n) % classes
    return np.sort(reps)


def gen_synthetic_pair(config: SyntheticConfig) -> tuple[Dataset, Dataset]:
    """Draw one source/target pair; identical configs give identical data."""
    rng = np.random.default_rng(config.seed)
    d = config.feature_dim
    n = config.samples_per_domain
    shift_vec = config.mean_shift * _shift_direction(d)

    if config.task_kind == CLASSIFICATION:
        centers = np.zeros((config.classes, d))
        centers[:, 0] = np.arange(config.classes)  # unit-spaced along axis 0
        perm = config.label_shift or tuple(range(config.classes))

        def _domain(translate, permute):
            labels = _balanced_labels(n, config.classes)
            feats = centers[labels] + config.noise_sigma * rng.standard_normal((n, d))
            if translate:
                feats = feats + shift_vec
            out_labels = np.asarray(perm)[labels] if permute else labels
            return feats, out_labels.astype(np.int64)

        src_x, src_y = _domain(translate=False, permute=False)
        tgt_x, tgt_y = _domain(translate=True, permute=True)
        source = Dataset(src_x, src_y, CLASSIFICATION, config.classes, name="synthetic-source")
        target = Dataset(tgt_x, tgt_y, CLASSIFICATION, config.classes, name="synthetic-target")
    else:
        w = rng.standard_normal(d)
        b = float(rng.standard_normal())
        out_shift = float(config.label_shift or 0.0)

        def _domain(translate, shift_out):
            feats = rng.standard_normal((n, d))
            if translate:
                feats = feats + shift_vec
            y = feats @ w + b + config.noise_sigma * rng.standard_normal(n)
            if shift_out:
                y = y + out_shift
            return feats, y

        src_x, src_y = _domain(translate=False, shift_out=False)
        tgt_x, tgt_y = _domain(translate=True, shift_out=True)
        source = Dataset(src_x, src_y, REGRESSION, name="synthetic-source")
        target = Dataset(tgt_x, tgt_y, REGRESSION, name="synthetic-target")
    return source, target
