"""Ground-cost matrices between discrete measures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import ValidationError
from ..measures import DiscreteMeasure

EUCLIDEAN = "euclidean"
SQUARED_EUCLIDEAN = "squared_euclidean"
ABSOLUTE = "absolute"
ZERO_ONE = "zero_one"

METRICS = (EUCLIDEAN, SQUARED_EUCLIDEAN, ABSOLUTE, ZERO_ONE)


@dataclass(frozen=True)
class CostMatrix:
    """Pairwise transport costs: entry (i, j) = metric(u_i, v_j) ** power."""

    values: np.ndarray
    metric: str
    power: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise ValidationError("cost matrix must be 2-D")
        if np.any(vals < 0):
            raise ValidationError("cost matrix has negative entries")
        vals = np.ascontiguousarray(vals)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def ground_cost(
    u: DiscreteMeasure,
    v: DiscreteMeasure,
    metric: str = EUCLIDEAN,
    p: float = 1.0,
) -> CostMatrix:
    """Pairwise ground distances raised to the transport order ``p``.

    ``zero_one`` compares support points for exact equality and works in
    any (shared) dimension; the other metrics require matching dimensions
    too and use the usual L2 / squared-L2 / L1 point distances.
    """
    if u.is_empty or v.is_empty:
        raise ValidationError("empty measure")
    if metric not in METRICS:
        raise ValidationError(f"unknown metric {metric!r}")
    if p < 1:
        raise ValidationError(f"transport order p must be >= 1, got {p}")
    if u.dim != v.dim:
        raise ValidationError(
            f"support dimensions differ: {u.dim} vs {v.dim}"
        )
    if metric == EUCLIDEAN:
        base = cdist(u.points, v.points, "euclidean")
    elif metric == SQUARED_EUCLIDEAN:
        base = cdist(u.points, v.points, "sqeuclidean")
    elif metric == ABSOLUTE:
        base = cdist(u.points, v.points, "cityblock")
    else:
        base = 1.0 - np.all(u.points[:, None, :] == v.points[None, :, :], axis=2)
    values = base if p == 1 else np.power(base, p)
    return CostMatrix(values=values, metric=metric, power=float(p))
