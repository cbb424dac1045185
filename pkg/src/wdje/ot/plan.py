"""Transport-plan container shared by all solvers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError

EXACT = "exact"
SINKHORN = "sinkhorn"
CLOSED_FORM_1D = "closed_form_1d"


@dataclass(frozen=True)
class TransportPlan:
    """A coupling matrix with its transported cost.

    ``objective`` is sum(coupling * cost) on the ground cost already raised
    to the order p, and ``distance`` its p-th root.  ``converged`` is only
    meaningful for the iterative solver.
    """

    coupling: np.ndarray
    objective: float
    distance: float
    solver: str
    iterations: int = 0
    converged: bool = True

    def __post_init__(self):
        coup = np.asarray(self.coupling, dtype=np.float64)
        if coup.ndim != 2:
            raise ValidationError("coupling must be 2-D")
        if np.any(coup < 0):
            raise ValidationError("coupling has negative entries")
        coup = np.ascontiguousarray(coup)
        coup.flags.writeable = False
        object.__setattr__(self, "coupling", coup)

    def marginal_residual(self, a: np.ndarray, b: np.ndarray) -> float:
        """Largest deviation of the coupling's marginals from (a, b)."""
        row = np.abs(self.coupling.sum(axis=1) - a).max()
        col = np.abs(self.coupling.sum(axis=0) - b).max()
        return float(max(row, col))
