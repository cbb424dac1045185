"""Solver-dispatch facade for Wasserstein distances."""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..errors import ValidationError
from ..measures import DiscreteMeasure
from .cost import ABSOLUTE, EUCLIDEAN, ground_cost
from .exact import emd_exact
from .one_d import monotone_plan
from .plan import TransportPlan
from .entropic import sinkhorn

AUTO = "auto"
SOLVERS = ("exact", "sinkhorn", AUTO)

# largest n*m still sent to the exact simplex under auto dispatch
DEFAULT_EXACT_THRESHOLD = 250_000


@dataclass(frozen=True)
class OTConfig:
    """Knobs for one Wasserstein computation; defaults follow the package
    conventions (order-1 transport, euclidean ground metric)."""

    metric: str = EUCLIDEAN
    p: float = 1.0
    solver: str = AUTO
    epsilon: float | None = None
    max_iter: int = 10_000
    tol: float = 1e-8
    exact_threshold: int = DEFAULT_EXACT_THRESHOLD

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise ValidationError(f"unknown solver {self.solver!r}")
        if self.p < 1:
            raise ValidationError(f"transport order p must be >= 1, got {self.p}")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be >= 1")

    def with_(self, **kw) -> "OTConfig":
        return replace(self, **kw)


def wasserstein(
    u: DiscreteMeasure,
    v: DiscreteMeasure,
    config: OTConfig | None = None,
) -> tuple[float, TransportPlan]:
    """Wasserstein distance plus the plan that certifies it.

    Auto dispatch: scalar supports take the closed form (for metrics that
    reduce to |x - y| on the line), small problems the exact simplex, and
    anything above ``exact_threshold`` couplings the Sinkhorn solver.
    """
    cfg = config or OTConfig()
    if u.is_empty or v.is_empty:
        raise ValidationError("empty measure")

    solver = cfg.solver
    if solver == AUTO:
        if u.dim == 1 and v.dim == 1 and cfg.metric in (EUCLIDEAN, ABSOLUTE):
            plan = monotone_plan(u, v, cfg.p)
            return plan.distance, plan
        if u.n_points * v.n_points <= cfg.exact_threshold:
            solver = "exact"
        else:
            solver = "sinkhorn"

    C = ground_cost(u, v, cfg.metric, cfg.p)
    if solver == "exact":
        plan = emd_exact(u, v, C)
    else:
        plan = sinkhorn(u, v, C, epsilon=cfg.epsilon, max_iter=cfg.max_iter, tol=cfg.tol)
    return plan.distance, plan
