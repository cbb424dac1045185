"""Transferability estimation from Wasserstein distances.

Computes an additive upper bound on the target risk of a transfer task
(source performance + domain difference + task difference + Lipschitz
slack), turns it into a transfer/no-transfer decision by comparison with
the target-only risk, and evaluates decisions against measured outcomes.
Analytical baselines (LEEP, NCE, LogME, H-score) ship for comparison.
"""

from ._accel import NUMBA_AVAILABLE, NUMBA_ENABLED
from .baselines import SourcePredictions, hscore, leep, logme, nce, pearson
from .bound import (
    BoundConfig,
    BoundReport,
    GeneralizationDiagnostics,
    LipschitzEstimate,
    attach_diagnostics,
    generalization_terms,
    lambda_and_phi,
    lipschitz_cross_entropy,
    lipschitz_mse,
    source_label_moment,
    target_risk_bound,
    target_risk_bound_unsupervised,
    task_difference_check,
    unsupervised_moment,
)
from .errors import NumericalError, ValidationError
from .measures import (
    CLASSIFICATION,
    REGRESSION,
    Dataset,
    DiscreteMeasure,
    LabelEncoding,
    empirical_measure,
    encode_labels,
    feature_measure,
    label_measure,
    load_dataset,
    save_dataset,
    split_source_labels,
    subsample_task,
)
from .ot import (
    CostMatrix,
    OTConfig,
    TransportPlan,
    emd_exact,
    ground_cost,
    sinkhorn,
    wasserstein,
    wasserstein_1d,
)
from .score import (
    ConfusionMatrix,
    ConsistencyResult,
    DecisionRecord,
    confusion_matrix,
    consistency_index,
    empirical_transferability,
    make_record,
    wdje_score,
)

__version__ = "0.1.0"

__all__ = [
    "CLASSIFICATION",
    "REGRESSION",
    "NUMBA_AVAILABLE",
    "NUMBA_ENABLED",
    "BoundConfig",
    "BoundReport",
    "ConfusionMatrix",
    "ConsistencyResult",
    "CostMatrix",
    "Dataset",
    "DecisionRecord",
    "DiscreteMeasure",
    "GeneralizationDiagnostics",
    "LabelEncoding",
    "LipschitzEstimate",
    "NumericalError",
    "OTConfig",
    "SourcePredictions",
    "TransportPlan",
    "ValidationError",
    "attach_diagnostics",
    "confusion_matrix",
    "consistency_index",
    "emd_exact",
    "empirical_measure",
    "empirical_transferability",
    "encode_labels",
    "feature_measure",
    "generalization_terms",
    "ground_cost",
    "hscore",
    "label_measure",
    "lambda_and_phi",
    "leep",
    "lipschitz_cross_entropy",
    "lipschitz_mse",
    "load_dataset",
    "logme",
    "make_record",
    "nce",
    "pearson",
    "save_dataset",
    "sinkhorn",
    "source_label_moment",
    "split_source_labels",
    "subsample_task",
    "target_risk_bound",
    "target_risk_bound_unsupervised",
    "task_difference_check",
    "unsupervised_moment",
    "wasserstein",
    "wasserstein_1d",
    "wdje_score",
]
