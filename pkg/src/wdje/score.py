"""Transfer/no-transfer decisions and their empirical evaluation.

The decision statistic is the bound total minus the target-only risk; a
negative value recommends the transfer.  Agreement with measured outcomes
is summarised by a four-cell confusion matrix and the consistency index.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bound import BoundReport
from .errors import ValidationError

TRANSFER = "transfer"
NO_TRANSFER = "no_transfer"


@dataclass(frozen=True)
class DecisionRecord:
    """One scored transfer task: bound, decision and (optionally) the
    empirically measured counterpart."""

    task_id: str
    tr_score: float
    decision: str
    bound: BoundReport
    risk_without: float
    empirical_tr: float | None = None

    @property
    def empirical_transferable(self) -> bool | None:
        if self.empirical_tr is None:
            return None
        return self.empirical_tr < 0

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "tr_score": self.tr_score,
            "decision": self.decision,
            "bound": self.bound.to_dict(),
            "risk_without": self.risk_without,
            "empirical_tr": self.empirical_tr,
            "empirical_transferable": self.empirical_transferable,
        }


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts over (empirical sign, predicted sign) pairs.

    ``n_pm`` e.g. counts tasks empirically non-transferable (+) but
    predicted transferable (-).  Exact zeros bind to the '+' side,
    matching the decision tie rule; how many records tied is kept in
    ``ties``.
    """

    n_pp: int
    n_pm: int
    n_mp: int
    n_mm: int
    ties: int = 0

    @property
    def total(self) -> int:
        return self.n_pp + self.n_pm + self.n_mp + self.n_mm

    def to_dict(self) -> dict:
        return {
            "n_pp": self.n_pp, "n_pm": self.n_pm,
            "n_mp": self.n_mp, "n_mm": self.n_mm, "ties": self.ties,
        }


@dataclass(frozen=True)
class ConsistencyResult:
    """Both readings of the consistency index.

    ``ci_definition`` divides by the predicted-transferable count
    (n_pm + n_mm); ``ci_table`` by the empirically-transferable count
    (n_mp + n_mm), which is the variant that matches published tables.
    A zero denominator leaves the value None (undefined), never an error.
    """

    ci_definition: float | None
    ci_table: float | None

    def to_dict(self) -> dict:
        return {"ci_definition": self.ci_definition, "ci_table": self.ci_table}


def wdje_score(bound: BoundReport, risk_without: float) -> tuple[float, str]:
    """Decision statistic and decision: transfer iff bound.total - risk < 0.

    Ties (score exactly 0) fall on the no-transfer side.
    """
    if risk_without < 0:
        raise ValidationError(f"risk_without must be >= 0, got {risk_without}")
    tr = bound.total - risk_without
    return tr, (TRANSFER if tr < 0 else NO_TRANSFER)


def empirical_transferability(loss_with_transfer: float, loss_without_transfer: float) -> float:
    """Measured loss difference; negative means the transfer helped."""
    if loss_with_transfer < 0 or loss_without_transfer < 0:
        raise ValidationError("losses must be >= 0")
    return loss_with_transfer - loss_without_transfer


def make_record(
    task_id: str,
    bound: BoundReport,
    risk_without: float,
    risk_with: float | None = None,
) -> DecisionRecord:
    """Score a task and bundle everything into a DecisionRecord."""
    tr, decision = wdje_score(bound, risk_without)
    emp = None
    if risk_with is not None:
        emp = empirical_transferability(risk_with, risk_without)
    return DecisionRecord(
        task_id=task_id,
        tr_score=tr,
        decision=decision,
        bound=bound,
        risk_without=float(risk_without),
        empirical_tr=emp,
    )


def confusion_matrix(records) -> ConfusionMatrix:
    """Bin records by (empirical, predicted) score signs.

    Requires every record to carry an empirical score; zeros on either
    axis count as '+' and are tallied in ``ties``.
    """
    n_pp = n_pm = n_mp = n_mm = ties = 0
    for rec in records:
        if rec.empirical_tr is None:
            raise ValidationError(f"record {rec.task_id!r} has no empirical score")
        if rec.empirical_tr == 0 or rec.tr_score == 0:
            ties += 1
        emp_plus = rec.empirical_tr >= 0
        pred_plus = rec.tr_score >= 0
        if emp_plus and pred_plus:
            n_pp += 1
        elif emp_plus:
            n_pm += 1
        elif pred_plus:
            n_mp += 1
        else:
            n_mm += 1
    return ConfusionMatrix(n_pp=n_pp, n_pm=n_pm, n_mp=n_mp, n_mm=n_mm, ties=ties)


def consistency_index(cm: ConfusionMatrix) -> ConsistencyResult:
    """Both consistency-index variants; None where the denominator is 0."""
    def _ratio(num: int, den: int) -> float | None:
        return num / den if den > 0 else None

    return ConsistencyResult(
        ci_definition=_ratio(cm.n_mm, cm.n_pm + cm.n_mm),
        ci_table=_ratio(cm.n_mm, cm.n_mp + cm.n_mm),
    )
