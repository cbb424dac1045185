"""Transportation-simplex kernel for exact discrete optimal transport.

This is the package's hottest loop.  The module-level ``transport_simplex``
is the numba build when acceleration is enabled (``WDJE_NUMBA``), otherwise
the identical Python/numpy source runs interpreted.  Both builds stay
importable as ``transport_simplex_python`` / ``transport_simplex_numba``
for parity tests and benchmarks.

Algorithm: network simplex specialised to the dense bipartite transport
graph.  Northwest-corner initial basis, BFS potentials over the basis tree,
block search for the entering arc (LEMON-style), and a switch to Bland's
rule after a long degenerate run so cycling cannot occur.
"""

from __future__ import annotations

import math

import numpy as np

from .._accel import NUMBA_AVAILABLE, NUMBA_ENABLED, jit_kernel

STATUS_OPTIMAL = 0
STATUS_PIVOT_LIMIT = 1


def _transport_simplex_impl(a, b, cost, tol, max_pivots):
    """Solve min <flow, cost> s.t. flow 1 = a, flow^T 1 = b, flow >= 0.

    Returns (flow, n_pivots, status).  ``a`` and ``b`` must be nonnegative
    with equal sums; ``tol`` is the reduced-cost threshold for optimality.
    """
    n = a.shape[0]
    m = b.shape[0]
    nm = n * m
    n_nodes = n + m

    flow = np.zeros((n, m))
    basic = np.zeros((n, m), dtype=np.bool_)
    # basis adjacency: row_adj[i, :row_deg[i]] = basic columns of row i
    row_adj = np.zeros((n, m), dtype=np.int64)
    row_deg = np.zeros(n, dtype=np.int64)
    col_adj = np.zeros((m, n), dtype=np.int64)
    col_deg = np.zeros(m, dtype=np.int64)

    # northwest-corner initial basis: n + m - 1 basic cells forming a tree
    ra = a.copy()
    rb = b.copy()
    i = 0
    j = 0
    while True:
        f = ra[i] if ra[i] < rb[j] else rb[j]
        flow[i, j] = f
        basic[i, j] = True
        row_adj[i, row_deg[i]] = j
        row_deg[i] += 1
        col_adj[j, col_deg[j]] = i
        col_deg[j] += 1
        ra[i] -= f
        rb[j] -= f
        if i == n - 1 and j == m - 1:
            break
        if ra[i] <= rb[j] and i < n - 1:
            i += 1
        elif j < m - 1:
            j += 1
        else:
            i += 1

    u = np.zeros(n)
    v = np.zeros(m)
    seen = np.zeros(n_nodes, dtype=np.bool_)
    queue = np.zeros(n_nodes, dtype=np.int64)
    parent = np.zeros(n_nodes, dtype=np.int64)
    path = np.zeros(n_nodes, dtype=np.int64)

    block = int(math.sqrt(nm)) + 1
    if block < 16:
        block = 16
    next_arc = 0
    degen_run = 0
    pivots = 0
    status = STATUS_OPTIMAL

    while True:
        # potentials: u_i + v_j = cost_ij on the basis tree, rooted at row 0
        for t in range(n_nodes):
            seen[t] = False
        u[0] = 0.0
        seen[0] = True
        queue[0] = 0
        head = 0
        tail = 1
        while head < tail:
            node = queue[head]
            head += 1
            if node < n:
                for k in range(row_deg[node]):
                    jj = row_adj[node, k]
                    if not seen[n + jj]:
                        v[jj] = cost[node, jj] - u[node]
                        seen[n + jj] = True
                        queue[tail] = n + jj
                        tail += 1
            else:
                jj = node - n
                for k in range(col_deg[jj]):
                    ii = col_adj[jj, k]
                    if not seen[ii]:
                        u[ii] = cost[ii, jj] - v[jj]
                        seen[ii] = True
                        queue[tail] = ii
                        tail += 1

        # entering arc: most negative reduced cost within scan blocks,
        # or smallest index (Bland) when stuck in a degenerate run
        bland = degen_run > n_nodes + 8
        enter_i = -1
        enter_j = -1
        if bland:
            for e in range(nm):
                ii = e // m
                jj = e - ii * m
                if basic[ii, jj]:
                    continue
                if cost[ii, jj] - u[ii] - v[jj] < -tol:
                    enter_i = ii
                    enter_j = jj
                    break
        else:
            best = -tol
            e = next_arc
            scanned = 0
            in_block = 0
            while scanned < nm:
                ii = e // m
                jj = e - ii * m
                if not basic[ii, jj]:
                    r = cost[ii, jj] - u[ii] - v[jj]
                    if r < best:
                        best = r
                        enter_i = ii
                        enter_j = jj
                e += 1
                if e == nm:
                    e = 0
                scanned += 1
                in_block += 1
                if in_block == block:
                    in_block = 0
                    if enter_i >= 0:
                        break
            next_arc = e
        if enter_i < 0:
            break

        pivots += 1
        if pivots > max_pivots:
            status = STATUS_PIVOT_LIMIT
            break

        # unique tree path from row-node enter_i to col-node enter_j
        for t in range(n_nodes):
            seen[t] = False
        seen[enter_i] = True
        parent[enter_i] = -1
        queue[0] = enter_i
        head = 0
        tail = 1
        target = n + enter_j
        while head < tail:
            node = queue[head]
            head += 1
            if node == target:
                break
            if node < n:
                for k in range(row_deg[node]):
                    jj = row_adj[node, k]
                    if not seen[n + jj]:
                        seen[n + jj] = True
                        parent[n + jj] = node
                        queue[tail] = n + jj
                        tail += 1
            else:
                jj = node - n
                for k in range(col_deg[jj]):
                    ii = col_adj[jj, k]
                    if not seen[ii]:
                        seen[ii] = True
                        parent[ii] = node
                        queue[tail] = ii
                        tail += 1

        path_len = 0
        node = target
        while node != -1:
            path[path_len] = node
            path_len += 1
            node = parent[node]
        # path now runs target .. enter_i; walk it reversed so the first
        # cell shares row enter_i with the entering arc and must give up
        # flow ('-'); signs alternate from there.
        delta = np.inf
        leave_i = -1
        leave_j = -1
        for t in range(path_len - 1):
            p_node = path[path_len - 1 - t]
            q_node = path[path_len - 2 - t]
            if p_node < n:
                ci = p_node
                cj = q_node - n
            else:
                ci = q_node
                cj = p_node - n
            if t % 2 == 0:
                ft = flow[ci, cj]
                if ft < delta or (
                    bland and ft == delta and ci * m + cj < leave_i * m + leave_j
                ):
                    delta = ft
                    leave_i = ci
                    leave_j = cj

        for t in range(path_len - 1):
            p_node = path[path_len - 1 - t]
            q_node = path[path_len - 2 - t]
            if p_node < n:
                ci = p_node
                cj = q_node - n
            else:
                ci = q_node
                cj = p_node - n
            if t % 2 == 0:
                flow[ci, cj] -= delta
            else:
                flow[ci, cj] += delta
        flow[enter_i, enter_j] = delta
        flow[leave_i, leave_j] = 0.0

        if delta > 0.0:
            degen_run = 0
        else:
            degen_run += 1

        # basis swap: drop the leaving cell, add the entering cell
        basic[leave_i, leave_j] = False
        for k in range(row_deg[leave_i]):
            if row_adj[leave_i, k] == leave_j:
                row_adj[leave_i, k] = row_adj[leave_i, row_deg[leave_i] - 1]
                row_deg[leave_i] -= 1
                break
        for k in range(col_deg[leave_j]):
            if col_adj[leave_j, k] == leave_i:
                col_adj[leave_j, k] = col_adj[leave_j, col_deg[leave_j] - 1]
                col_deg[leave_j] -= 1
                break
        basic[enter_i, enter_j] = True
        row_adj[enter_i, row_deg[enter_i]] = enter_j
        row_deg[enter_i] += 1
        col_adj[enter_j, col_deg[enter_j]] = enter_i
        col_deg[enter_j] += 1

    return flow, pivots, status


transport_simplex_python = _transport_simplex_impl
transport_simplex_numba = (
    jit_kernel(_transport_simplex_impl) if NUMBA_AVAILABLE else None
)
transport_simplex = (
    transport_simplex_numba if NUMBA_ENABLED else transport_simplex_python
)
