"""Subtask sweeps: grid construction, per-cell pipeline, evaluation.

One cell = (class cap c, sampling ratio r, seed).  Each cell subsamples
the target task, computes the transport distances and the risk bound,
trains the target-only and transfer baselines for empirical risks, scores
the decision and the analytical baselines, and lands in one ``SweepRow``.
Cell failures are recorded in the row's status and never abort the sweep.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

import numpy as np

from ..baselines import SourcePredictions, hscore, leep, logme, nce, pearson
from ..bound import (
    BoundConfig,
    lipschitz_cross_entropy,
    lipschitz_mse,
    source_label_moment,
    target_risk_bound,
    target_risk_bound_unsupervised,
    unsupervised_moment,
)
from ..errors import ValidationError
from ..measures import (
    CLASSIFICATION,
    Dataset,
    LabelEncoding,
    ONE_HOT,
    RAW_SCALAR,
    empirical_measure,
    encode_labels,
    feature_measure,
    split_source_labels,
    subsample_task,
)
from ..ot import ABSOLUTE, EUCLIDEAN, OTConfig, wasserstein
from ..score import confusion_matrix, consistency_index, make_record
from .models import (
    TrainConfig,
    _fit_transfer,
    logistic_accuracy,
    logistic_proba,
    logistic_risk,
    ridge_risk,
    train_target_baseline,
)
from .synth import SyntheticConfig, gen_synthetic_pair

METRIC_COLUMNS = ("bound_total", "leep", "nce", "logme", "hscore")

# fixed CSV/JSON column order for SweepRow
ROW_FIELDS = (
    "task_id", "c", "r", "seed", "bound_total", "tr_score", "risk_without",
    "risk_with", "empirical_tr", "leep", "nce", "logme", "hscore",
    "domain_term", "mode", "accuracy_without", "accuracy_with", "status",
)


@dataclass(frozen=True)
class SweepGrid:
    c_values: tuple = (None,)
    r_values: tuple = (1.0,)
    seeds: tuple = (0,)

    def __post_init__(self):
        if not self.c_values or not self.r_values or not self.seeds:
            raise ValidationError("grid axes must be nonempty")
        object.__setattr__(self, "c_values", tuple(self.c_values))
        object.__setattr__(self, "r_values", tuple(float(r) for r in self.r_values))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    def cells(self):
        return list(itertools.product(self.c_values, self.r_values, self.seeds))


@dataclass(frozen=True)
class PipelineConfig:
    ot: OTConfig = field(default_factory=OTConfig)
    bound: BoundConfig = field(default_factory=BoundConfig)
    hyper: TrainConfig = field(default_factory=TrainConfig)
    model: str | None = None  # None -> pick by task kind
    target_label_fraction: float = 1.0
    # > 0 reserves that share of the target pool (before ratio subsampling)
    # as a fixed evaluation set; risks are then held-out, not training, risks
    heldout_fraction: float = 0.0

    def __post_init__(self):
        if not 0 <= self.target_label_fraction <= 1:
            raise ValidationError("target_label_fraction must lie in [0, 1]")
        if not 0 <= self.heldout_fraction < 1:
            raise ValidationError("heldout_fraction must lie in [0, 1)")


@dataclass(frozen=True)
class SweepRow:
    task_id: str
    c: int | None
    r: float
    seed: int
    bound_total: float | None = None
    tr_score: float | None = None
    risk_without: float | None = None
    risk_with: float | None = None
    empirical_tr: float | None = None
    leep: float | None = None
    nce: float | None = None
    logme: float | None = None
    hscore: float | None = None
    domain_term: float | None = None
    mode: str | None = None
    accuracy_without: float | None = None
    accuracy_with: float | None = None
    status: str = "ok"

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in ROW_FIELDS}


def _label_ot_config(cfg: OTConfig, encoding: LabelEncoding) -> OTConfig:
    metric = EUCLIDEAN if encoding.mode == ONE_HOT else ABSOLUTE
    return cfg.with_(metric=metric)


def _labelled_slice(dataset: Dataset, n_t1: int) -> Dataset:
    return Dataset(
        features=dataset.features[:n_t1],
        labels=dataset.labels[:n_t1] if dataset.has_labels else None,
        task_kind=dataset.task_kind,
        class_count=dataset.class_count,
        name=dataset.name,
    )


def _split_eval_pool(pool: Dataset, fraction: float, seed: int):
    """Reserve a fixed, seed-determined evaluation slice of the target pool."""
    n_eval = int(fraction * pool.n_samples)
    if n_eval == 0 or n_eval == pool.n_samples:
        return pool, None
    order = np.random.default_rng(seed + 0x5EED).permutation(pool.n_samples)
    eval_idx = np.sort(order[:n_eval])
    train_idx = np.sort(order[n_eval:])

    def _take(idx):
        return Dataset(
            features=pool.features[idx],
            labels=pool.labels[idx] if pool.has_labels else None,
            task_kind=pool.task_kind,
            class_count=pool.class_count,
            name=pool.name,
        )

    return _take(train_idx), _take(eval_idx)


def run_cell(
    source: Dataset,
    target: Dataset,
    task_id: str,
    c: int | None,
    r: float,
    seed: int,
    pipeline: PipelineConfig,
) -> SweepRow:
    """Full pipeline for one grid cell."""
    if c is not None and source.task_kind == CLASSIFICATION:
        # cap both domains at c classes so the transfer head stays aligned
        source = subsample_task(source, classes=c, ratio=1.0, seed=seed)
        target = subsample_task(target, classes=c, ratio=1.0, seed=seed)
    eval_slice = None
    if pipeline.heldout_fraction > 0:
        target, eval_slice = _split_eval_pool(target, pipeline.heldout_fraction, seed)
    tgt = subsample_task(target, classes=None, ratio=r, seed=seed)

    n_t1 = int(pipeline.target_label_fraction * tgt.n_samples)
    n_t1 = min(n_t1, source.n_samples)

    W_x, _ = wasserstein(feature_measure(source), feature_measure(tgt), pipeline.ot)

    if tgt.task_kind == CLASSIFICATION:
        encoding = LabelEncoding(ONE_HOT, source.class_count)
    else:
        encoding = LabelEncoding(RAW_SCALAR)
    label_cfg = _label_ot_config(pipeline.ot, encoding)

    if n_t1 == 0:
        source_label_full = empirical_measure(encode_labels(source.labels, encoding))
        moment = unsupervised_moment(source_label_full, pipeline.bound.p)
        W_y = 0.0
        supervised = False
    else:
        s1, s2 = split_source_labels(source, n_t1, encoding)
        target_labels = empirical_measure(encode_labels(tgt.labels[:n_t1], encoding))
        W_y, _ = wasserstein(s1, target_labels, label_cfg)
        moment = source_label_moment(s2, pipeline.bound.p)
        supervised = True

    # empirical risks always come from the available target rows; with the
    # unsupervised bound (n_t1 = 0) they are evaluation-only ground truth
    labelled = _labelled_slice(tgt, n_t1) if 0 < n_t1 < tgt.n_samples else tgt

    if tgt.task_kind == CLASSIFICATION:
        k_est = lipschitz_cross_entropy(tgt.features, source.class_count)
    else:
        k_est = lipschitz_mse(labelled.features, labelled.labels,
                              pipeline.bound.K_weight_sup)

    train_slice = labelled
    risk_without, params0 = train_target_baseline(train_slice, pipeline.model, pipeline.hyper)
    risk_with, source_risk, params_t, params_s = _fit_transfer(
        source, train_slice, pipeline.model, pipeline.hyper
    )
    acc_without = acc_with = None
    if tgt.task_kind == CLASSIFICATION:
        eval_on = eval_slice or train_slice
        if eval_slice is not None:
            risk_without = logistic_risk(params0, eval_on.features, eval_on.labels)
            risk_with = logistic_risk(params_t, eval_on.features, eval_on.labels)
        acc_without = logistic_accuracy(params0, eval_on.features, eval_on.labels)
        acc_with = logistic_accuracy(params_t, eval_on.features, eval_on.labels)
    elif eval_slice is not None:
        risk_without = ridge_risk(params0, eval_slice.features, eval_slice.labels)
        risk_with = ridge_risk(params_t, eval_slice.features, eval_slice.labels)

    cfg = pipeline.bound
    if supervised:
        report = target_risk_bound(source_risk, W_x, W_y, moment, k_est.k, cfg)
    else:
        report = target_risk_bound_unsupervised(source_risk, W_x, moment, k_est.k, cfg)
    record = make_record(task_id, report, risk_without, risk_with)

    leep_v = nce_v = hscore_v = logme_v = None
    if tgt.task_kind == CLASSIFICATION:
        preds = SourcePredictions(logistic_proba(params_s, train_slice.features))
        leep_v = leep(preds, train_slice.labels, source.class_count)
        nce_v = nce(preds.pseudo_labels, train_slice.labels)
        if len(np.unique(train_slice.labels)) >= 2:
            hscore_v = hscore(train_slice.features, train_slice.labels)
            logme_v = logme(train_slice.features, train_slice.labels, CLASSIFICATION)
    else:
        logme_v = logme(train_slice.features, train_slice.labels, tgt.task_kind)

    return SweepRow(
        task_id=task_id, c=c, r=r, seed=seed,
        bound_total=report.total,
        tr_score=record.tr_score,
        risk_without=risk_without,
        risk_with=risk_with,
        empirical_tr=record.empirical_tr,
        leep=leep_v, nce=nce_v, logme=logme_v, hscore=hscore_v,
        domain_term=report.domain_term,
        mode=report.mode,
        accuracy_without=acc_without,
        accuracy_with=acc_with,
        status="ok",
    )


def run_sweep(
    grid: SweepGrid,
    pipeline: PipelineConfig | None = None,
    source: Dataset | None = None,
    target: Dataset | None = None,
    synthetic: SyntheticConfig | None = None,
) -> list[SweepRow]:
    """Run every grid cell; either a dataset pair or a synthetic config.

    Cells are independent; a failing cell yields a row whose status holds
    the error while the sweep keeps going.
    """
    pipeline = pipeline or PipelineConfig()
    if synthetic is None and (source is None or target is None):
        raise ValidationError("provide either (source, target) or a synthetic config")
    rows = []
    for c, r, seed in grid.cells():
        task_id = f"c{c if c is not None else 'all'}-r{r}-s{seed}"
        try:
            if synthetic is not None:
                src, tgt = gen_synthetic_pair(replace(synthetic, seed=seed))
            else:
                src, tgt = source, target
            rows.append(run_cell(src, tgt, task_id, c, r, seed, pipeline))
        except Exception as exc:  # noqa: BLE001 - per-cell isolation is the contract
            rows.append(SweepRow(task_id=task_id, c=c, r=r, seed=seed,
                                 status=f"error: {exc}"))
    return rows


@dataclass(frozen=True)
class SweepEvaluation:
    pearson: dict
    confusion: object
    ci: object

    def to_dict(self) -> dict:
        return {
            "pearson": dict(self.pearson),
            "confusion": self.confusion.to_dict(),
            "ci": self.ci.to_dict(),
        }


def evaluate_sweep(rows) -> SweepEvaluation:
    """Correlate each metric column against the empirical transfer loss and
    tabulate decision consistency.

    Metric columns with zero variance (or too few values) come out None.
    """
    usable = [row for row in rows if row.status == "ok" and row.empirical_tr is not None]
    if len(usable) < 3:
        raise ValidationError(f"need >= 3 usable rows, got {len(usable)}")
    loss = np.array([row.risk_with for row in usable])
    correlations = {}
    for column in METRIC_COLUMNS:
        values = [(getattr(row, column), lw) for row, lw in zip(usable, loss)
                  if getattr(row, column) is not None]
        if len(values) < 3:
            correlations[column] = None
            continue
        a = np.array([v for v, _ in values])
        b = np.array([w for _, w in values])
        try:
            correlations[column] = pearson(a, b)
        except ValidationError:
            correlations[column] = None  # zero variance, undefined
    records = [
        _ScorePair(row.task_id, row.tr_score, row.empirical_tr) for row in usable
    ]
    cm = confusion_matrix(records)
    return SweepEvaluation(pearson=correlations, confusion=cm, ci=consistency_index(cm))


class _ScorePair:
    """Adapter giving confusion_matrix the two fields it bins on."""

    __slots__ = ("task_id", "tr_score", "empirical_tr")

    def __init__(self, task_id, tr_score, empirical_tr):
        self.task_id = task_id
        self.tr_score = tr_score
        self.empirical_tr = empirical_tr
