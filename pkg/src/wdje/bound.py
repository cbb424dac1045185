"""Target-risk upper bound assembly.

The bound decomposes additively into five reported terms:

    total = source_risk                      (source model performance)
          + k * lambda * W_x                 (domain difference)
          + W_y                              (task difference, labelled part)
          + moment                           (task difference, moment part)
          + k * M * phi(lambda)              (probabilistic-Lipschitz slack)

Supervised assembly uses the Wasserstein distance between the first-n_t1
source-label measure and the target-label measure plus the p-norm moment of
the remaining source labels; the unsupervised variant drops the labelled
part and takes the moment over the full source label measure.  Risks enter
as precomputed scalars; producing them from models is the harness's job.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .measures import DiscreteMeasure, LabelEncoding, ONE_HOT

CROSS_ENTROPY = "cross_entropy"
MSE = "mse"

SUPERVISED = "supervised"
UNSUPERVISED = "unsupervised"

DEFAULT_K_LAMBDA = 0.001
DEFAULT_K_FLOOR = 1e-6


@dataclass(frozen=True)
class BoundConfig:
    """Constants entering the bound: the loss family, the fixed k*lambda
    product, the output-range bound M and the transport order p."""

    loss: str = CROSS_ENTROPY
    k_lambda_product: float = DEFAULT_K_LAMBDA
    M: float = 1.0
    p: float = 1.0
    K_weight_sup: float = 1.0
    label_encoding: LabelEncoding | None = None

    def __post_init__(self):
        if self.loss not in (CROSS_ENTROPY, MSE):
            raise ValidationError(f"unknown loss {self.loss!r}")
        if self.k_lambda_product <= 0:
            raise ValidationError("k_lambda_product must be > 0")
        if self.M <= 0:
            raise ValidationError("M must be > 0")
        if self.p < 1:
            raise ValidationError("p must be >= 1")
        if self.K_weight_sup <= 0:
            raise ValidationError("K_weight_sup must be > 0")


@dataclass(frozen=True)
class LipschitzEstimate:
    """A loss Lipschitz constant together with the norms that produced it."""

    k: float
    norms: dict
    clamped: bool = False

    def __float__(self) -> float:
        return self.k


@dataclass(frozen=True)
class GeneralizationDiagnostics:
    """User-supplied constants for the finite-sample diagnostic terms.

    The Rademacher complexity, the concentration constant zeta and the
    moment bounds m_q are not computable from data here; they are taken as
    given and the resulting terms are reported separately, never folded
    into the decision total.
    """

    delta: float = 0.05
    B: float = 1.0
    M_S: float = 1.0
    rademacher: float = 0.0
    zeta: float = 0.0
    q: float = 2.0
    d: int = 3  # must exceed 2p
    p: float = 1.0
    m_q_x_source: float = 1.0
    m_q_x_target: float = 1.0
    m_q_y_source: float = 1.0
    m_q_y_target: float = 1.0
    sampling_terms: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 < self.delta <= 1:
            raise ValidationError("delta must lie in (0, 1]")
        for name in ("B", "M_S", "rademacher", "zeta",
                     "m_q_x_source", "m_q_x_target", "m_q_y_source", "m_q_y_target"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")
        if not 0 < self.p < self.d / 2:
            raise ValidationError(f"p={self.p} must lie in (0, d/2) with d={self.d}")
        if self.q <= self.p:
            raise ValidationError(f"q={self.q} must exceed p={self.p}")
        if math.isclose(self.q, self.d / (self.d - self.p)):
            raise ValidationError("q must differ from d / (d - p)")


@dataclass(frozen=True)
class BoundReport:
    """The five-term additive decomposition of the target-risk bound."""

    source_risk: float
    k: float
    lambda_: float
    phi_lambda: float
    domain_term: float
    task_term_w: float
    task_term_moment: float
    slack_term: float
    total: float
    mode: str
    diagnostics: GeneralizationDiagnostics | None = None

    def to_dict(self) -> dict:
        out = {
            "source_risk": self.source_risk,
            "k": self.k,
            "lambda": self.lambda_,
            "phi_lambda": self.phi_lambda,
            "domain_term": self.domain_term,
            "task_term_w": self.task_term_w,
            "task_term_moment": self.task_term_moment,
            "slack_term": self.slack_term,
            "total": self.total,
            "mode": self.mode,
        }
        if self.diagnostics is not None:
            out["diagnostics"] = dict(self.diagnostics.sampling_terms)
        return out


def lipschitz_cross_entropy(X, c: int) -> LipschitzEstimate:
    """Cross-entropy loss constant k = ((c-1) / (c * N)) * ||X||.

    ``||X||`` is the spectral norm of the target feature matrix.  An
    all-zero matrix gives k = 0 and a warning, since lambda = product / k
    is undefined downstream.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValidationError("feature matrix must be 2-D and nonempty")
    if c < 2:
        raise ValidationError("class count must be >= 2")
    norm = float(np.linalg.norm(X, 2))
    k = (c - 1) / (c * X.shape[0]) * norm
    if k == 0.0:
        warnings.warn(
            "zero feature matrix gives Lipschitz constant k = 0; "
            "lambda is undefined downstream",
            stacklevel=2,
        )
    return LipschitzEstimate(k=k, norms={"spectral": norm})


def lipschitz_mse(X, y, K: float = 1.0, floor: float = DEFAULT_K_FLOOR) -> LipschitzEstimate:
    """MSE loss constant k = (K / N) * ||X^T X|| - (1 / N) * ||y^T X||.

    ``||X^T X||`` is spectral, ``||y^T X||`` the euclidean vector norm.
    The formula can go nonpositive; such values are clamped to ``floor``
    and flagged so lambda stays defined.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValidationError("feature matrix must be 2-D and nonempty")
    if len(y) != X.shape[0]:
        raise ValidationError("features and labels must be row-aligned")
    n = X.shape[0]
    xtx_norm = float(np.linalg.norm(X.T @ X, 2))
    ytx_norm = float(np.linalg.norm(y @ X))
    k = (K / n) * xtx_norm - (1.0 / n) * ytx_norm
    clamped = k <= 0
    if clamped:
        warnings.warn(
            f"MSE Lipschitz formula gave k = {k:.3e} <= 0; clamped to {floor}",
            stacklevel=2,
        )
        k = floor
    return LipschitzEstimate(k=k, norms={"xtx": xtx_norm, "ytx": ytx_norm}, clamped=clamped)


def lambda_and_phi(k: float, config: BoundConfig | None = None) -> tuple[float, float]:
    """lambda = product / k and phi(lambda) = exp(-lambda).

    phi may underflow to exactly 0 for extreme lambda; that is permitted.
    """
    cfg = config or BoundConfig()
    k = float(k)
    if k <= 0:
        raise ValidationError(f"Lipschitz constant must be > 0, got {k}")
    lam = cfg.k_lambda_product / k
    return lam, math.exp(-lam)


def source_label_moment(s2: DiscreteMeasure, p: float = 1.0) -> float:
    """(sum_i w_i ||y_i||^p)^(1/p) over encoded labels; 0 for the empty part."""
    if p < 1:
        raise ValidationError("p must be >= 1")
    if s2.is_empty:
        return 0.0
    norms = np.linalg.norm(s2.points, axis=1)
    total = float(np.sum(s2.weights * norms**p))
    return total ** (1.0 / p) if total > 0 else 0.0


def _assemble(source_risk, W_x, W_y, moment, k, cfg, mode) -> BoundReport:
    for name, val in (("source_risk", source_risk), ("W_x", W_x),
                      ("W_y", W_y), ("moment", moment)):
        if val < 0:
            raise ValidationError(f"{name} must be >= 0, got {val}")
    lam, phi = lambda_and_phi(k, cfg)
    domain_term = k * lam * W_x
    slack_term = k * cfg.M * phi
    total = source_risk + domain_term + W_y + moment + slack_term
    return BoundReport(
        source_risk=float(source_risk),
        k=float(k),
        lambda_=lam,
        phi_lambda=phi,
        domain_term=domain_term,
        task_term_w=float(W_y),
        task_term_moment=float(moment),
        slack_term=slack_term,
        total=total,
        mode=mode,
    )


def target_risk_bound(
    source_risk: float,
    W_x: float,
    W_y_s1_t: float,
    moment_s2: float,
    k: float | LipschitzEstimate,
    config: BoundConfig | None = None,
) -> BoundReport:
    """Supervised bound: all five terms from the label-split decomposition."""
    return _assemble(source_risk, W_x, W_y_s1_t, moment_s2, float(k),
                     config or BoundConfig(), SUPERVISED)


def target_risk_bound_unsupervised(
    source_risk: float,
    W_x: float,
    moment_full_source: float,
    k: float | LipschitzEstimate,
    config: BoundConfig | None = None,
) -> BoundReport:
    """Unsupervised bound: no labelled task term, moment over all source labels."""
    return _assemble(source_risk, W_x, 0.0, moment_full_source, float(k),
                     config or BoundConfig(), UNSUPERVISED)


def unsupervised_moment(source_labels: DiscreteMeasure, p: float = 1.0) -> float:
    """Moment of the full source label measure; unlike the split moment an
    empty measure is an error here (the unsupervised path still needs
    source labels)."""
    if source_labels.is_empty:
        raise ValidationError("unsupervised bound requires source labels")
    return source_label_moment(source_labels, p)


def generalization_terms(
    diag: GeneralizationDiagnostics,
    N_S: int,
    N_T: int,
    N_t1: int,
) -> dict:
    """Finite-sample diagnostic terms from user-supplied constants.

    Returns the named terms and their sum; these report how far empirical
    quantities may sit from their population versions and never alter a
    bound total.
    """
    for name, val in (("N_S", N_S), ("N_T", N_T), ("N_t1", N_t1)):
        if val < 1:
            raise ValidationError(f"{name} must be >= 1")
    log_term = math.log(1.0 / diag.delta)
    p, q, d = diag.p, diag.q, diag.d

    domain_sampling = diag.B * math.sqrt(0.5 * log_term) * (
        1.0 / math.sqrt(N_S) + 1.0 / math.sqrt(N_T)
    )
    label_sampling = diag.B * math.sqrt(log_term / (2.0 * math.sqrt(N_t1)))

    def _rate(n: int) -> float:
        return n ** (-p / d) + n ** (-(q - p) / q)

    gamma_x = diag.zeta * (
        diag.m_q_x_source ** (p / q) * _rate(N_S)
        + diag.m_q_x_target ** (p / q) * _rate(N_T)
    )
    gamma_y = diag.zeta * (
        diag.m_q_y_source ** (p / q) + diag.m_q_y_target ** (p / q)
    ) * _rate(N_t1)
    source_generalization = 2.0 * diag.rademacher + diag.M_S * math.sqrt(
        log_term / (2.0 * N_S)
    )
    terms = {
        "domain_sampling": domain_sampling,
        "label_sampling": label_sampling,
        "gamma_x": gamma_x,
        "gamma_y": gamma_y,
        "source_generalization": source_generalization,
    }
    terms["total"] = sum(terms.values())
    return terms


def attach_diagnostics(
    report: BoundReport,
    diag: GeneralizationDiagnostics,
    N_S: int,
    N_T: int,
    N_t1: int,
) -> BoundReport:
    """Evaluate the diagnostic terms and attach them to a report.

    The report's total is untouched; the terms ride along for inspection.
    """
    terms = generalization_terms(diag, N_S, N_T, N_t1)
    diag_with_terms = GeneralizationDiagnostics(
        delta=diag.delta, B=diag.B, M_S=diag.M_S, rademacher=diag.rademacher,
        zeta=diag.zeta, q=diag.q, d=diag.d, p=diag.p,
        m_q_x_source=diag.m_q_x_source, m_q_x_target=diag.m_q_x_target,
        m_q_y_source=diag.m_q_y_source, m_q_y_target=diag.m_q_y_target,
        sampling_terms=terms,
    )
    return BoundReport(
        source_risk=report.source_risk, k=report.k, lambda_=report.lambda_,
        phi_lambda=report.phi_lambda, domain_term=report.domain_term,
        task_term_w=report.task_term_w, task_term_moment=report.task_term_moment,
        slack_term=report.slack_term, total=report.total, mode=report.mode,
        diagnostics=diag_with_terms,
    )


def task_difference_check(
    source_labels_full: DiscreteMeasure,
    s1: DiscreteMeasure,
    target_labels: DiscreteMeasure,
    s2: DiscreteMeasure,
    ot_config=None,
) -> dict:
    """Empirically evaluate both sides of the task-difference inequality.

    The label-split decomposition asserts W(full source, target) is at most
    W(s1, target) + moment(s2).  For generic empirical measures the right
    side can come out smaller; this diagnostic reports both sides and the
    gap instead of asserting.
    """
    from .ot import OTConfig, wasserstein

    cfg = ot_config or OTConfig()
    lhs, _ = wasserstein(source_labels_full, target_labels, cfg)
    if s1.is_empty:
        rhs_w = 0.0
    else:
        rhs_w, _ = wasserstein(s1, target_labels, cfg)
    rhs_moment = source_label_moment(s2, cfg.p)
    rhs = rhs_w + rhs_moment
    return {
        "lhs_w_full": lhs,
        "rhs_w_s1": rhs_w,
        "rhs_moment_s2": rhs_moment,
        "rhs": rhs,
        "gap": rhs - lhs,
        "holds": bool(lhs <= rhs + 1e-12),
    }
