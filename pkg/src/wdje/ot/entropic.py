"""Entropic-regularized transport via log-domain Sinkhorn scaling.

Two builds of the scaling loop exist: a numba kernel with explicit loops
and a vectorized numpy version.  ``WDJE_NUMBA`` selects which one backs
the public ``sinkhorn`` function; both are exported for benchmarks.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from .._accel import NUMBA_AVAILABLE, NUMBA_ENABLED, jit_kernel
from ..errors import NumericalError, ValidationError
from ..measures import DiscreteMeasure
from .cost import CostMatrix
from .exact import _validate_pair
from .plan import SINKHORN, TransportPlan

# residual check runs every iteration: one extra exp-pass per two update
# passes, in exchange for exact convergence iteration counts
_CHECK_EVERY = 1


def _sinkhorn_loop_impl(a, b, cost, eps, max_iter, tol):
    """Alternating log-domain scaling with max-stabilized log-sum-exp.

    Returns (coupling, iterations, residual).  A zero weight sends the
    corresponding dual to -inf, which zeroes its coupling line exactly.
    """
    n = a.shape[0]
    m = b.shape[0]
    inv_eps = 1.0 / eps
    log_a = np.empty(n)
    log_b = np.empty(m)
    for i in range(n):
        log_a[i] = math.log(a[i]) if a[i] > 0.0 else -np.inf
    for j in range(m):
        log_b[j] = math.log(b[j]) if b[j] > 0.0 else -np.inf
    f = np.zeros(n)
    g = np.zeros(m)
    it = 0
    err = np.inf
    while it < max_iter:
        it += 1
        for i in range(n):
            if log_a[i] == -np.inf:
                f[i] = -np.inf
                continue
            mx = -np.inf
            for j in range(m):
                t = (g[j] - cost[i, j]) * inv_eps
                if t > mx:
                    mx = t
            s = 0.0
            for j in range(m):
                s += math.exp((g[j] - cost[i, j]) * inv_eps - mx)
            f[i] = eps * (log_a[i] - mx - math.log(s))
        for j in range(m):
            if log_b[j] == -np.inf:
                g[j] = -np.inf
                continue
            mx = -np.inf
            for i in range(n):
                t = (f[i] - cost[i, j]) * inv_eps
                if t > mx:
                    mx = t
            s = 0.0
            for i in range(n):
                s += math.exp((f[i] - cost[i, j]) * inv_eps - mx)
            g[j] = eps * (log_b[j] - mx - math.log(s))
        if it % _CHECK_EVERY == 0 or it == max_iter:
            # columns are exact right after the g-update; rows carry the error
            err = 0.0
            for i in range(n):
                s = 0.0
                for j in range(m):
                    s += math.exp((f[i] + g[j] - cost[i, j]) * inv_eps)
                d = abs(s - a[i])
                if d > err:
                    err = d
            if err != err:  # NaN
                break
            if err <= tol:
                break
    coupling = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            coupling[i, j] = math.exp((f[i] + g[j] - cost[i, j]) * inv_eps)
    return coupling, it, err


sinkhorn_loop_python = _sinkhorn_loop_impl
sinkhorn_loop_numba = jit_kernel(_sinkhorn_loop_impl) if NUMBA_AVAILABLE else None


def sinkhorn_loop_numpy(a, b, cost, eps, max_iter, tol):
    """Vectorized twin of the scaling loop (the numba-off path)."""
    with np.errstate(divide="ignore"):
        log_a = np.log(a)
        log_b = np.log(b)
    f = np.zeros_like(a)
    g = np.zeros_like(b)
    it = 0
    err = np.inf
    while it < max_iter:
        it += 1
        f = eps * (log_a - logsumexp((g[None, :] - cost) / eps, axis=1))
        g = eps * (log_b - logsumexp((f[:, None] - cost) / eps, axis=0))
        if it % _CHECK_EVERY == 0 or it == max_iter:
            with np.errstate(invalid="ignore"):
                plan = np.exp((f[:, None] + g[None, :] - cost) / eps)
            err = float(np.abs(plan.sum(axis=1) - a).max())
            if np.isnan(err) or err <= tol:
                break
    with np.errstate(invalid="ignore"):
        coupling = np.exp((f[:, None] + g[None, :] - cost) / eps)
    return coupling, it, err


_default_loop = sinkhorn_loop_numba if NUMBA_ENABLED else sinkhorn_loop_numpy


def sinkhorn(
    u: DiscreteMeasure,
    v: DiscreteMeasure,
    C: CostMatrix,
    epsilon: float | None = None,
    max_iter: int = 10_000,
    tol: float = 1e-8,
) -> TransportPlan:
    """Entropic-regularized coupling between two discrete measures.

    ``epsilon`` defaults to 0.1 * mean(C).  Non-convergence within
    ``max_iter`` is reported through ``converged=False``, not raised; NaN
    in the scalings (epsilon too small for the cost scale) is an error.
    The reported objective is the transported cost of the returned
    coupling, without the entropy term.
    """
    _validate_pair(u, v, C)
    if epsilon is None:
        epsilon = 0.1 * float(C.values.mean())
        if epsilon <= 0:
            epsilon = 1e-3
    if epsilon <= 0:
        raise ValidationError(f"epsilon must be > 0, got {epsilon}")
    if tol <= 0:
        raise ValidationError(f"tol must be > 0, got {tol}")

    coupling, iters, err = _default_loop(
        u.weights.copy(), v.weights.copy(), C.values, float(epsilon),
        int(max_iter), float(tol),
    )
    if not np.all(np.isfinite(coupling)):
        raise NumericalError(
            "NaN in Sinkhorn scalings; epsilon is too small for this cost "
            "scale, try a larger epsilon"
        )
    objective = float(np.sum(coupling * C.values))
    distance = objective ** (1.0 / C.power) if objective > 0 else 0.0
    return TransportPlan(
        coupling=coupling,
        objective=objective,
        distance=distance,
        solver=SINKHORN,
        iterations=int(iters),
        converged=bool(err <= tol),
    )
