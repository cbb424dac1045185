"""Discrete optimal-transport solvers.

Exact earth-mover distances come from a transportation-simplex kernel,
large instances from log-domain Sinkhorn scaling, and scalar supports from
the quantile closed form; ``wasserstein`` dispatches between them.
"""

from .cost import (
    ABSOLUTE,
    EUCLIDEAN,
    METRICS,
    SQUARED_EUCLIDEAN,
    ZERO_ONE,
    CostMatrix,
    ground_cost,
)
from .dispatch import AUTO, DEFAULT_EXACT_THRESHOLD, OTConfig, wasserstein
from .exact import emd_exact
from .one_d import monotone_plan, wasserstein_1d
from .plan import CLOSED_FORM_1D, EXACT, SINKHORN, TransportPlan
from .entropic import sinkhorn

__all__ = [
    "ABSOLUTE",
    "AUTO",
    "CLOSED_FORM_1D",
    "DEFAULT_EXACT_THRESHOLD",
    "EUCLIDEAN",
    "EXACT",
    "METRICS",
    "SINKHORN",
    "SQUARED_EUCLIDEAN",
    "ZERO_ONE",
    "CostMatrix",
    "OTConfig",
    "TransportPlan",
    "emd_exact",
    "ground_cost",
    "monotone_plan",
    "sinkhorn",
    "wasserstein",
    "wasserstein_1d",
]
