"""Datasets, empirical measures, label encoding and the source-label split.

Everything downstream (transport distances, risk bounds, sweeps) consumes
the two containers defined here: ``Dataset`` for raw feature/label tables
and ``DiscreteMeasure`` for weighted Dirac mixtures.  Both are immutable
after construction and safe to share across workers.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

CLASSIFICATION = "classification"
REGRESSION = "regression"

ONE_HOT = "one_hot"
RAW_SCALAR = "raw_scalar"

_WEIGHT_SUM_TOL = 1e-12

_MAGIC = b"WDJE"
_VERSION = 1


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class LabelEncoding:
    """How labels are turned into vectors for label-space geometry.

    ``one_hot`` maps class index c to the c-th standard basis vector of
    R^class_count; ``raw_scalar`` keeps the value as a 1-vector.
    """

    mode: str
    class_count: int | None = None

    def __post_init__(self):
        if self.mode not in (ONE_HOT, RAW_SCALAR):
            raise ValidationError(f"unknown label encoding mode {self.mode!r}")
        if self.mode == ONE_HOT:
            if self.class_count is None or self.class_count < 2:
                raise ValidationError("one_hot encoding requires class_count >= 2")


@dataclass(frozen=True)
class Dataset:
    """A feature matrix with optional labels and task metadata.

    features : (n, d) float array, no NaN/Inf.
    labels   : optional length-n vector; int class indices in [0, C-1] for
               classification, real scalars for regression.
    """

    features: np.ndarray
    labels: np.ndarray | None
    task_kind: str
    class_count: int | None = None
    name: str = ""

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        if feats.ndim != 2:
            raise ValidationError(f"features must be 2-D, got shape {feats.shape}")
        if not np.all(np.isfinite(feats)):
            i, j = np.argwhere(~np.isfinite(feats))[0]
            raise ValidationError(f"non-finite feature value at row {i}, column {j}")
        object.__setattr__(self, "features", _freeze(feats))

        if self.task_kind not in (CLASSIFICATION, REGRESSION):
            raise ValidationError(f"unknown task_kind {self.task_kind!r}")

        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.ndim != 1:
                raise ValidationError("labels must be a 1-D vector")
            if len(labels) != len(feats):
                raise ValidationError(
                    f"{len(feats)} feature rows but {len(labels)} labels"
                )
            if not np.all(np.isfinite(labels.astype(np.float64))):
                i = int(np.flatnonzero(~np.isfinite(labels.astype(np.float64)))[0])
                raise ValidationError(f"non-finite label at row {i}")
            if self.task_kind == CLASSIFICATION:
                as_int = labels.astype(np.int64)
                if not np.allclose(labels.astype(np.float64), as_int):
                    raise ValidationError("classification labels must be integers")
                labels = as_int
                c = self.class_count
                if c is None:
                    c = max(int(labels.max()) + 1 if len(labels) else 2, 2)
                    object.__setattr__(self, "class_count", c)
                if c < 2:
                    raise ValidationError("class_count must be >= 2")
                bad = (labels < 0) | (labels >= c)
                if np.any(bad):
                    i = int(np.flatnonzero(bad)[0])
                    raise ValidationError(
                        f"label {labels[i]} at row {i} outside [0, {c - 1}]"
                    )
            else:
                labels = labels.astype(np.float64)
            object.__setattr__(self, "labels", _freeze(labels))
        elif self.task_kind == CLASSIFICATION and self.class_count is not None:
            if self.class_count < 2:
                raise ValidationError("class_count must be >= 2")

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    def default_encoding(self) -> LabelEncoding:
        if self.task_kind == CLASSIFICATION:
            return LabelEncoding(ONE_HOT, self.class_count)
        return LabelEncoding(RAW_SCALAR)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Weighted support points (a Dirac mixture).

    Weights are nonnegative and sum to one; the empty measure (no support
    points) is an explicit, flagged state rather than an error.
    """

    points: np.ndarray
    weights: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise ValidationError(f"points must be 2-D, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("non-finite support point")
        n = pts.shape[0]
        w = self.weights
        if w is None:
            w = np.full(n, 1.0 / n) if n else np.zeros(0)
        w = np.asarray(w, dtype=np.float64)
        if w.ndim != 1 or len(w) != n:
            raise ValidationError(
                f"{n} support points but weight vector of length {len(w)}"
            )
        if np.any(w < 0):
            raise ValidationError("negative weight")
        if n and abs(w.sum() - 1.0) > _WEIGHT_SUM_TOL:
            raise ValidationError(f"weights sum to {w.sum()!r}, expected 1")
        object.__setattr__(self, "points", _freeze(pts))
        object.__setattr__(self, "weights", _freeze(w))

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def is_empty(self) -> bool:
        return self.n_points == 0


def empirical_measure(points, weights=None) -> DiscreteMeasure:
    """Build a discrete measure, defaulting to uniform weights.

    Given weights are renormalized to sum one; an all-zero weight vector or
    an empty point set is rejected.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[0] == 0:
        raise ValidationError("empty point set")
    if weights is None:
        return DiscreteMeasure(pts)
    w = np.asarray(weights, dtype=np.float64)
    if np.any(w < 0):
        raise ValidationError("negative weight")
    total = w.sum()
    if total <= 0:
        raise ValidationError("all-zero weight vector")
    return DiscreteMeasure(pts, w / total)


def encode_labels(labels, encoding: LabelEncoding) -> np.ndarray:
    """Map a label vector to the (n, k) matrix used for label geometry."""
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise ValidationError("labels must be a 1-D vector")
    if encoding.mode == RAW_SCALAR:
        return labels.astype(np.float64)[:, None]
    c = encoding.class_count
    as_float = labels.astype(np.float64)
    as_int = labels.astype(np.int64)
    if not np.allclose(as_float, as_int):
        raise ValidationError("one_hot encoding requires integer labels")
    if np.any((as_int < 0) | (as_int >= c)):
        bad = int(as_int[(as_int < 0) | (as_int >= c)][0])
        raise ValidationError(f"label {bad} outside [0, {c - 1}]")
    out = np.zeros((len(as_int), c))
    out[np.arange(len(as_int)), as_int] = 1.0
    return out


def label_measure(dataset: Dataset, encoding: LabelEncoding | None = None) -> DiscreteMeasure:
    """Uniform empirical measure over a dataset's encoded labels."""
    if not dataset.has_labels:
        raise ValidationError(f"dataset {dataset.name!r} has no labels")
    enc = encoding or dataset.default_encoding()
    return empirical_measure(encode_labels(dataset.labels, enc))


def feature_measure(dataset: Dataset) -> DiscreteMeasure:
    """Uniform empirical measure over a dataset's feature rows."""
    return empirical_measure(dataset.features)


def split_source_labels(
    source: Dataset, n_t1: int, encoding: LabelEncoding | None = None
) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """Partition source labels into the first ``n_t1`` and the remainder.

    Returns uniform measures over the encoded labels of each part.  Either
    part may come out empty (flagged, see ``DiscreteMeasure.is_empty``);
    downstream bound assembly decides what an empty part means.
    """
    if not source.has_labels:
        raise ValidationError("cannot split an unlabeled source")
    n = source.n_samples
    if not 0 <= n_t1 <= n:
        raise ValidationError(f"n_t1={n_t1} outside [0, {n}]")
    enc = encoding or source.default_encoding()
    encoded = encode_labels(source.labels, enc)

    def _part(block: np.ndarray) -> DiscreteMeasure:
        if block.shape[0] == 0:
            return DiscreteMeasure(np.zeros((0, encoded.shape[1])), np.zeros(0))
        return empirical_measure(block)

    return _part(encoded[:n_t1]), _part(encoded[n_t1:])


def subsample_task(
    dataset: Dataset,
    classes: int | None = None,
    ratio: float = 1.0,
    seed: int = 0,
) -> Dataset:
    """Restrict to the first ``classes`` labels, then sample a ratio of rows.

    Classification keeps rows with label < classes; for regression the
    ``classes`` argument is ignored.  Sampling is without replacement via
    ``numpy.random.default_rng(seed)`` (PCG64) and keeps original row
    order, so identical arguments always give the identical dataset.
    """
    if not 0 < ratio <= 1:
        raise ValidationError(f"ratio must lie in (0, 1], got {ratio}")
    keep = np.arange(dataset.n_samples)
    class_count = dataset.class_count
    if classes is not None and dataset.task_kind == CLASSIFICATION:
        if dataset.class_count is not None and classes > dataset.class_count:
            raise ValidationError(
                f"requested {classes} classes but dataset has {dataset.class_count}"
            )
        if not dataset.has_labels:
            raise ValidationError("class filter requires labels")
        keep = keep[dataset.labels < classes]
        class_count = classes
    n_keep = math.ceil(ratio * len(keep))
    if n_keep == 0 or len(keep) == 0:
        raise ValidationError("subsampling produced an empty dataset")
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(keep, size=n_keep, replace=False))
    return Dataset(
        features=dataset.features[chosen],
        labels=None if dataset.labels is None else dataset.labels[chosen],
        task_kind=dataset.task_kind,
        class_count=class_count,
        name=f"{dataset.name}[c={classes},r={ratio}]" if dataset.name else "",
    )


# --------------------------------------------------------------------------
# File formats
# --------------------------------------------------------------------------
#
# CSV: UTF-8, header row, feature columns then an optional label column
# (named "label" by default), decimal-point reals.
#
# Binary: magic "WDJE", u32 version (=1), then the feature block as
# u64 rows / u64 cols / row-major little-endian f64, then a u8 tag
# (0 = no labels, 1 = labels follow) and, when tagged, the label block in
# the same rows/cols/f64 layout (n x 1).


def load_dataset(
    path,
    format: str = "csv",
    task_kind: str = REGRESSION,
    label_column: str | None = "label",
    class_count: int | None = None,
    name: str | None = None,
) -> Dataset:
    """Read a dataset from disk in either supported format."""
    if format == "csv":
        features, labels = _read_csv(path, label_column)
    elif format == "binary":
        features, labels = _read_binary(path)
    else:
        raise ValidationError(f"unknown format {format!r}")
    return Dataset(
        features=features,
        labels=labels,
        task_kind=task_kind,
        class_count=class_count,
        name=name if name is not None else str(path),
    )


def save_dataset(dataset: Dataset, path, format: str = "csv",
                 label_column: str = "label") -> None:
    """Write a dataset in either supported format (inverse of load)."""
    if format == "csv":
        _write_csv(dataset, path, label_column)
    elif format == "binary":
        _write_binary(dataset, path)
    else:
        raise ValidationError(f"unknown format {format!r}")


def _parse_cell(text: str, row: int, col: str):
    try:
        value = float(text)
    except ValueError:
        raise ValidationError(
            f"cannot parse {text!r} at row {row}, column {col!r}"
        ) from None
    if not math.isfinite(value):
        raise ValidationError(f"non-finite value {text!r} at row {row}, column {col!r}")
    return value


def _read_csv(path, label_column):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        label_idx = None
        if label_column is not None and label_column in header:
            label_idx = header.index(label_column)
        feat_cols = [i for i in range(len(header)) if i != label_idx]
        feats, labels = [], []
        for row_no, row in enumerate(reader):
            if not row:
                continue
            if len(row) != len(header):
                raise ValidationError(
                    f"{path}: row {row_no} has {len(row)} cells, header has {len(header)}"
                )
            feats.append([_parse_cell(row[i], row_no, header[i]) for i in feat_cols])
            if label_idx is not None:
                labels.append(_parse_cell(row[label_idx], row_no, label_column))
    if not feats:
        raise ValidationError(f"{path}: no data rows")
    features = np.array(feats, dtype=np.float64)
    label_arr = np.array(labels, dtype=np.float64) if label_idx is not None else None
    return features, label_arr


def _write_csv(dataset: Dataset, path, label_column: str):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        cols = [f"f{i}" for i in range(dataset.n_features)]
        if dataset.has_labels:
            cols.append(label_column)
        writer.writerow(cols)
        for i in range(dataset.n_samples):
            row = [repr(float(v)) for v in dataset.features[i]]
            if dataset.has_labels:
                lbl = dataset.labels[i]
                row.append(repr(int(lbl)) if dataset.task_kind == CLASSIFICATION else repr(float(lbl)))
            writer.writerow(row)


def _read_matrix_block(fh, path, what):
    head = fh.read(16)
    if len(head) != 16:
        raise ValidationError(f"{path}: truncated {what} block header")
    rows, cols = struct.unpack("<QQ", head)
    payload = fh.read(rows * cols * 8)
    if len(payload) != rows * cols * 8:
        raise ValidationError(f"{path}: truncated {what} block data")
    return np.frombuffer(payload, dtype="<f8").reshape(rows, cols).astype(np.float64)


def _read_binary(path):
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValidationError(f"{path}: bad magic bytes {magic!r}")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != _VERSION:
            raise ValidationError(f"{path}: unsupported version {version}")
        features = _read_matrix_block(fh, path, "feature")
        tag = fh.read(1)
        if len(tag) != 1:
            raise ValidationError(f"{path}: missing label tag byte")
        labels = None
        if tag[0] == 1:
            block = _read_matrix_block(fh, path, "label")
            if block.shape[1] != 1:
                raise ValidationError(f"{path}: label block must have one column")
            labels = block[:, 0]
        elif tag[0] != 0:
            raise ValidationError(f"{path}: bad label tag {tag[0]}")
    return features, labels


def _write_matrix_block(fh, matrix: np.ndarray):
    fh.write(struct.pack("<QQ", matrix.shape[0], matrix.shape[1]))
    fh.write(np.ascontiguousarray(matrix, dtype="<f8").tobytes())


def _write_binary(dataset: Dataset, path):
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", _VERSION))
        _write_matrix_block(fh, dataset.features)
        if dataset.has_labels:
            fh.write(bytes([1]))
            _write_matrix_block(fh, dataset.labels.astype(np.float64)[:, None])
        else:
            fh.write(bytes([0]))
