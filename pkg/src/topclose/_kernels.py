"""Hot numeric kernels over CSR adjacency arrays.

Every kernel exists twice: a loop version compiled with numba's ``@njit``
(``nb_*``) and a vectorized pure-numpy fallback (``np_*``). The module-level
names used by the rest of the package point at the numba versions when numba
is importable, unless the environment variable ``TOPCLOSE_NUMBA=0`` forces the
numpy path. ``bench/bench_kernels.py`` times the two side by side.

All graph kernels take ``(indptr, indices)`` with int64 indptr of length n+1
and neighbor ids sorted within each segment. Distances use -1 for
"unreached"; callers translate to an explicit infinity where exposed.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "TOPCLOSE_NUMBA"


def _numba_requested() -> bool:
    return os.environ.get(_ENV_FLAG, "1").strip().lower() not in ("0", "false", "off", "no")


USE_NUMBA = False
if _numba_requested():
    try:
        from numba import njit as _njit

        USE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False


# ---------------------------------------------------------------------------
# numpy helpers

def _gather_segments(indptr, indices, nodes):
    """Concatenate the CSR segments of `nodes` without a python loop."""
    starts = indptr[nodes]
    counts = indptr[nodes + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=indices.dtype)
    ends = np.cumsum(counts)
    pos = np.arange(total, dtype=np.int64) + np.repeat(starts - (ends - counts), counts)
    return indices[pos]


# ---------------------------------------------------------------------------
# single-source BFS distances

def np_bfs_distances(indptr, indices, source):
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    d = 0
    while frontier.size:
        neigh = _gather_segments(indptr, indices, frontier)
        if neigh.size == 0:
            break
        fresh = np.unique(neigh[dist[neigh] < 0])
        if fresh.size == 0:
            break
        d += 1
        dist[fresh] = d
        frontier = fresh
    return dist


if USE_NUMBA:

    @_njit(cache=True, nogil=True)
    def nb_bfs_distances(indptr, indices, source):
        n = indptr.shape[0] - 1
        dist = np.full(n, -1, dtype=np.int64)
        queue = np.empty(n, dtype=np.int64)
        head = 0
        tail = 0
        queue[tail] = source
        tail += 1
        dist[source] = 0
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if dist[v] < 0:
                    dist[v] = du + 1
                    queue[tail] = v
                    tail += 1
        return dist


# ---------------------------------------------------------------------------
# all-sources farness (sum of distances) and reach counts

def np_farness(indptr, indices):
    n = indptr.shape[0] - 1
    farness = np.zeros(n, dtype=np.int64)
    reach = np.zeros(n, dtype=np.int64)
    for s in range(n):
        dist = np_bfs_distances(indptr, indices, s)
        hit = dist >= 0
        farness[s] = int(dist[hit].sum())
        reach[s] = int(hit.sum())
    return farness, reach


if USE_NUMBA:

    @_njit(cache=True, nogil=True)
    def nb_farness(indptr, indices):
        n = indptr.shape[0] - 1
        farness = np.zeros(n, dtype=np.int64)
        reach = np.zeros(n, dtype=np.int64)
        dist = np.empty(n, dtype=np.int64)
        queue = np.empty(n, dtype=np.int64)
        for s in range(n):
            dist[:] = -1
            head = 0
            tail = 0
            queue[tail] = s
            tail += 1
            dist[s] = 0
            total = 0
            while head < tail:
                u = queue[head]
                head += 1
                du = dist[u]
                total += du
                for j in range(indptr[u], indptr[u + 1]):
                    v = indices[j]
                    if dist[v] < 0:
                        dist[v] = du + 1
                        queue[tail] = v
                        tail += 1
            farness[s] = total
            reach[s] = tail
        return farness, reach


# ---------------------------------------------------------------------------
# truncated-BFS ring statistics
#
# counts[v, t-1]  = number of nodes at exact distance t from v, t = 1..radius
# degsum[v, t]    = sum of degrees of nodes at exact distance t, t = 0..radius
#                   (t = 0 row is v's own degree)

def np_ring_stats(indptr, indices, radius):
    n = indptr.shape[0] - 1
    deg = (indptr[1:] - indptr[:-1]).astype(np.int64)
    counts = np.zeros((n, radius), dtype=np.int64)
    degsum = np.zeros((n, radius + 1), dtype=np.int64)
    degsum[:, 0] = deg
    seen = np.zeros(n, dtype=bool)
    for v in range(n):
        seen[v] = True
        touched = [np.array([v], dtype=np.int64)]
        frontier = np.array([v], dtype=np.int64)
        for t in range(1, radius + 1):
            neigh = _gather_segments(indptr, indices, frontier)
            if neigh.size == 0:
                break
            fresh = np.unique(neigh[~seen[neigh]])
            if fresh.size == 0:
                break
            seen[fresh] = True
            touched.append(fresh)
            counts[v, t - 1] = fresh.size
            degsum[v, t] = int(deg[fresh].sum())
            frontier = fresh
        seen[np.concatenate(touched)] = False
    return counts, degsum


if USE_NUMBA:

    @_njit(cache=True, nogil=True)
    def nb_ring_stats(indptr, indices, radius):
        n = indptr.shape[0] - 1
        counts = np.zeros((n, radius), dtype=np.int64)
        degsum = np.zeros((n, radius + 1), dtype=np.int64)
        dist = np.full(n, -1, dtype=np.int64)
        queue = np.empty(n, dtype=np.int64)
        for v in range(n):
            head = 0
            tail = 0
            queue[tail] = v
            tail += 1
            dist[v] = 0
            degsum[v, 0] = indptr[v + 1] - indptr[v]
            while head < tail:
                u = queue[head]
                head += 1
                du = dist[u]
                if du >= radius:
                    continue
                for j in range(indptr[u], indptr[u + 1]):
                    w = indices[j]
                    if dist[w] < 0:
                        dist[w] = du + 1
                        counts[v, du] += 1
                        degsum[v, du + 1] += indptr[w + 1] - indptr[w]
                        queue[tail] = w
                        tail += 1
            for i in range(tail):
                dist[queue[i]] = -1
        return counts, degsum


# ---------------------------------------------------------------------------
# pairwise-distance histogram and eccentricities (connected graphs)

def np_distance_histogram(indptr, indices):
    n = indptr.shape[0] - 1
    hist = np.zeros(n, dtype=np.int64)
    ecc = np.zeros(n, dtype=np.int64)
    for s in range(n):
        dist = np_bfs_distances(indptr, indices, s)
        pos = dist[dist > 0]
        if pos.size:
            bc = np.bincount(pos)
            hist[: bc.size] += bc
            ecc[s] = int(pos.max())
    return hist, ecc


if USE_NUMBA:

    @_njit(cache=True, nogil=True)
    def nb_distance_histogram(indptr, indices):
        n = indptr.shape[0] - 1
        hist = np.zeros(n, dtype=np.int64)
        ecc = np.zeros(n, dtype=np.int64)
        dist = np.empty(n, dtype=np.int64)
        queue = np.empty(n, dtype=np.int64)
        for s in range(n):
            dist[:] = -1
            head = 0
            tail = 0
            queue[tail] = s
            tail += 1
            dist[s] = 0
            emax = 0
            while head < tail:
                u = queue[head]
                head += 1
                du = dist[u]
                if du > 0:
                    hist[du] += 1
                    if du > emax:
                        emax = du
                for j in range(indptr[u], indptr[u + 1]):
                    v = indices[j]
                    if dist[v] < 0:
                        dist[v] = du + 1
                        queue[tail] = v
                        tail += 1
            ecc[s] = emax
        return hist, ecc


# ---------------------------------------------------------------------------
# per-node triangle counts (neighbor lists must be sorted)

def np_triangle_counts(indptr, indices):
    n = indptr.shape[0] - 1
    tri = np.zeros(n, dtype=np.int64)
    mask = np.zeros(n, dtype=bool)
    for v in range(n):
        nbrs = indices[indptr[v]: indptr[v + 1]]
        if nbrs.size < 2:
            continue
        mask[nbrs] = True
        two_hop = _gather_segments(indptr, indices, nbrs)
        tri[v] = int(mask[two_hop].sum()) // 2
        mask[nbrs] = False
    return tri


if USE_NUMBA:

    @_njit(cache=True, nogil=True)
    def nb_triangle_counts(indptr, indices):
        n = indptr.shape[0] - 1
        tri = np.zeros(n, dtype=np.int64)
        for v in range(n):
            lo = indptr[v]
            hi = indptr[v + 1]
            if hi - lo < 2:
                continue
            c = 0
            for j in range(lo, hi):
                u = indices[j]
                # two-pointer intersection of sorted N(u) and N(v)
                a = indptr[u]
                ahi = indptr[u + 1]
                b = lo
                while a < ahi and b < hi:
                    x = indices[a]
                    y = indices[b]
                    if x == y:
                        c += 1
                        a += 1
                        b += 1
                    elif x < y:
                        a += 1
                    else:
                        b += 1
            tri[v] = c // 2
        return tri


# ---------------------------------------------------------------------------
# binary measurement matrix products (rows given as CSR over column ids)

def np_row_sums(rows_indptr, cols, x):
    m = rows_indptr.shape[0] - 1
    if cols.size == 0:
        return np.zeros(m, dtype=np.float64)
    sizes = rows_indptr[1:] - rows_indptr[:-1]
    row_ids = np.repeat(np.arange(m, dtype=np.int64), sizes)
    return np.bincount(row_ids, weights=x[cols], minlength=m)


def np_col_scatter(rows_indptr, cols, r, n):
    if cols.size == 0:
        return np.zeros(n, dtype=np.float64)
    sizes = rows_indptr[1:] - rows_indptr[:-1]
    return np.bincount(cols, weights=np.repeat(r, sizes), minlength=n)


if USE_NUMBA:

    @_njit(cache=True, nogil=True)
    def nb_row_sums(rows_indptr, cols, x):
        m = rows_indptr.shape[0] - 1
        out = np.zeros(m, dtype=np.float64)
        for i in range(m):
            acc = 0.0
            for j in range(rows_indptr[i], rows_indptr[i + 1]):
                acc += x[cols[j]]
            out[i] = acc
        return out

    @_njit(cache=True, nogil=True)
    def nb_col_scatter(rows_indptr, cols, r, n):
        out = np.zeros(n, dtype=np.float64)
        for i in range(rows_indptr.shape[0] - 1):
            ri = r[i]
            for j in range(rows_indptr[i], rows_indptr[i + 1]):
                out[cols[j]] += ri
        return out


# ---------------------------------------------------------------------------
# accelerated proximal gradient loop for  lam*||x||_1 + ||Ax - y||^2
#
# A is the binary row-support matrix in CSR form. Function-value adaptive
# restart: whenever the accelerated step raises the objective, momentum is
# dropped and a plain prox step is taken from the previous iterate, which
# keeps the accepted objective sequence non-increasing for step <= 1/L.
# Termination needs both a relative objective change below tol and a KKT
# subgradient residual below kkt_target; the objective plateaus at float
# resolution long before the iterate stops improving, so the objective rule
# alone would stop orders of magnitude short of the achievable optimality.
# Returns (x, objective, iterations, converged).

def _kkt_max_violation(g2, x, lam, nonneg):
    """Max violation given g2 = 2 A^T (Ax - y)."""
    viol = np.where(x != 0, np.abs(g2 + lam * np.sign(x)), 0.0)
    zero = x == 0
    if nonneg:
        viol[zero] = np.maximum(0.0, -(g2[zero] + lam))
    else:
        viol[zero] = np.maximum(0.0, np.abs(g2[zero]) - lam)
    return float(viol.max()) if viol.size else 0.0


def np_fista(rows_indptr, cols, y, n, lam, step, nonneg, tol, kkt_target,
             max_iter):
    m = rows_indptr.shape[0] - 1
    sizes = rows_indptr[1:] - rows_indptr[:-1]
    row_ids = np.repeat(np.arange(m, dtype=np.int64), sizes)

    def ax(v):
        return np.bincount(row_ids, weights=v[cols], minlength=m)

    def at(r):
        return np.bincount(cols, weights=r[row_ids], minlength=n)

    def prox(v, t):
        if nonneg:
            return np.maximum(v - t, 0.0)
        return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)

    thresh = step * lam
    x = np.zeros(n)
    resid = -y.astype(np.float64)
    fx = float(resid @ resid)
    z = x.copy()
    theta = 1.0
    iterations = 0
    converged = False
    for it in range(1, max_iter + 1):
        iterations = it
        rz = ax(z) - y
        x_new = prox(z - (2.0 * step) * at(rz), thresh)
        resid_new = ax(x_new) - y
        f_new = lam * float(np.abs(x_new).sum()) + float(resid_new @ resid_new)
        if f_new > fx:
            theta = 1.0
            x_new = prox(x - (2.0 * step) * at(resid), thresh)
            resid_new = ax(x_new) - y
            f_new = lam * float(np.abs(x_new).sum()) + float(resid_new @ resid_new)
        theta_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * theta * theta))
        z = x_new + ((theta - 1.0) / theta_new) * (x_new - x)
        theta = theta_new
        x = x_new
        delta = fx - f_new
        fx = f_new
        resid = resid_new
        if abs(delta) <= tol * max(abs(fx), 1e-30):
            kkt = _kkt_max_violation(2.0 * at(resid), x, lam, nonneg)
            if kkt <= kkt_target:
                converged = True
                break
    return x, fx, iterations, converged


if USE_NUMBA:

    @_njit(cache=True, nogil=True)
    def nb_fista(rows_indptr, cols, y, n, lam, step, nonneg, tol, kkt_target,
                 max_iter):
        m = rows_indptr.shape[0] - 1
        thresh = step * lam
        x = np.zeros(n)
        z = np.zeros(n)
        grad = np.empty(n)
        x_new = np.empty(n)
        resid = -y.astype(np.float64)
        resid_new = np.empty(m)
        fx = 0.0
        for i in range(m):
            fx += resid[i] * resid[i]
        theta = 1.0
        iterations = 0
        converged = False
        for it in range(1, max_iter + 1):
            iterations = it
            # gradient of the data term at z: 2 * A^T (A z - y)
            grad[:] = 0.0
            for i in range(m):
                acc = 0.0
                for j in range(rows_indptr[i], rows_indptr[i + 1]):
                    acc += z[cols[j]]
                ri = acc - y[i]
                for j in range(rows_indptr[i], rows_indptr[i + 1]):
                    grad[cols[j]] += ri
            for t in range(2):  # t=0: accelerated step, t=1: restart fallback
                f_new = 0.0
                for jn in range(n):
                    base = z[jn] if t == 0 else x[jn]
                    v = base - (2.0 * step) * grad[jn]
                    if nonneg:
                        v = v - thresh
                        if v < 0.0:
                            v = 0.0
                    else:
                        if v > thresh:
                            v = v - thresh
                        elif v < -thresh:
                            v = v + thresh
                        else:
                            v = 0.0
                    x_new[jn] = v
                    f_new += lam * abs(v)
                for i in range(m):
                    acc = 0.0
                    for j in range(rows_indptr[i], rows_indptr[i + 1]):
                        acc += x_new[cols[j]]
                    resid_new[i] = acc - y[i]
                    f_new += resid_new[i] * resid_new[i]
                if t == 0 and f_new > fx:
                    # restart: recompute the gradient at x and go again
                    theta = 1.0
                    grad[:] = 0.0
                    for i in range(m):
                        ri = resid[i]
                        for j in range(rows_indptr[i], rows_indptr[i + 1]):
                            grad[cols[j]] += ri
                else:
                    break
            theta_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * theta * theta))
            mom = (theta - 1.0) / theta_new
            for jn in range(n):
                z[jn] = x_new[jn] + mom * (x_new[jn] - x[jn])
                x[jn] = x_new[jn]
            theta = theta_new
            delta = fx - f_new
            fx = f_new
            for i in range(m):
                resid[i] = resid_new[i]
            if abs(delta) <= tol * max(abs(fx), 1e-30):
                grad[:] = 0.0
                for i in range(m):
                    ri = resid[i]
                    for j in range(rows_indptr[i], rows_indptr[i + 1]):
                        grad[cols[j]] += ri
                kkt = 0.0
                for jn in range(n):
                    gj = 2.0 * grad[jn]
                    xv = x[jn]
                    if xv > 0.0:
                        v = abs(gj + lam)
                    elif xv < 0.0:
                        v = abs(gj - lam)
                    elif nonneg:
                        v = max(0.0, -(gj + lam))
                    else:
                        v = max(0.0, abs(gj) - lam)
                    if v > kkt:
                        kkt = v
                if kkt <= kkt_target:
                    converged = True
                    break
        return x, fx, iterations, converged


# ---------------------------------------------------------------------------
# score-weighted frontier walk
#
# Starting from `start`, repeatedly draw the next node from the current
# frontier with probability proportional to weights[node] (cumulative-sum +
# binary search), absorb it, and expand the frontier with its unseen
# neighbors. One uniform from `uniforms` is consumed per extension. Returns
# the visited nodes in absorption order and their count (< steps+1 when the
# component is exhausted early).

def np_frontier_walk(indptr, indices, weights, start, steps, uniforms):
    n = indptr.shape[0] - 1
    state = np.zeros(n, dtype=np.int8)  # 0 unseen, 1 frontier, 2 visited
    visited = np.empty(steps + 1, dtype=np.int64)
    visited[0] = start
    state[start] = 2
    frontier = indices[indptr[start]: indptr[start + 1]].astype(np.int64).copy()
    state[frontier] = 1
    count = 1
    for step in range(steps):
        if frontier.size == 0:
            break
        cum = np.cumsum(weights[frontier])
        r = uniforms[step] * cum[-1]
        pick = int(np.searchsorted(cum, r, side="right"))
        if pick >= frontier.size:
            pick = frontier.size - 1
        v = int(frontier[pick])
        visited[count] = v
        count += 1
        state[v] = 2
        frontier[pick] = frontier[-1]
        frontier = frontier[:-1]
        nbrs = indices[indptr[v]: indptr[v + 1]]
        fresh = nbrs[state[nbrs] == 0].astype(np.int64)
        if fresh.size:
            state[fresh] = 1
            frontier = np.concatenate((frontier, fresh))
    return visited, count


if USE_NUMBA:

    @_njit(cache=True, nogil=True)
    def nb_frontier_walk(indptr, indices, weights, start, steps, uniforms):
        n = indptr.shape[0] - 1
        state = np.zeros(n, dtype=np.int8)
        visited = np.empty(steps + 1, dtype=np.int64)
        frontier = np.empty(n, dtype=np.int64)
        cum = np.empty(n, dtype=np.float64)
        visited[0] = start
        state[start] = 2
        fsize = 0
        for j in range(indptr[start], indptr[start + 1]):
            frontier[fsize] = indices[j]
            state[indices[j]] = 1
            fsize += 1
        count = 1
        for step in range(steps):
            if fsize == 0:
                break
            acc = 0.0
            for i in range(fsize):
                acc += weights[frontier[i]]
                cum[i] = acc
            r = uniforms[step] * acc
            pick = np.searchsorted(cum[:fsize], r, side="right")
            if pick >= fsize:
                pick = fsize - 1
            v = frontier[pick]
            visited[count] = v
            count += 1
            state[v] = 2
            frontier[pick] = frontier[fsize - 1]
            fsize -= 1
            for j in range(indptr[v], indptr[v + 1]):
                w = indices[j]
                if state[w] == 0:
                    state[w] = 1
                    frontier[fsize] = w
                    fsize += 1
        return visited, count


# ---------------------------------------------------------------------------
# classic uniform random walk (revisits collapse into the support)

def np_uniform_walk(indptr, indices, start, steps, uniforms):
    n = indptr.shape[0] - 1
    seen = np.zeros(n, dtype=bool)
    visited = np.empty(steps + 1, dtype=np.int64)
    visited[0] = start
    seen[start] = True
    count = 1
    cur = start
    for step in range(steps):
        lo = indptr[cur]
        deg = indptr[cur + 1] - lo
        if deg == 0:
            break
        cur = int(indices[lo + int(uniforms[step] * deg)])
        if not seen[cur]:
            seen[cur] = True
            visited[count] = cur
            count += 1
    return visited, count


if USE_NUMBA:

    @_njit(cache=True, nogil=True)
    def nb_uniform_walk(indptr, indices, start, steps, uniforms):
        n = indptr.shape[0] - 1
        seen = np.zeros(n, dtype=np.bool_)
        visited = np.empty(steps + 1, dtype=np.int64)
        visited[0] = start
        seen[start] = True
        count = 1
        cur = start
        for step in range(steps):
            lo = indptr[cur]
            deg = indptr[cur + 1] - lo
            if deg == 0:
                break
            cur = indices[lo + int(uniforms[step] * deg)]
            if not seen[cur]:
                seen[cur] = True
                visited[count] = cur
                count += 1
        return visited, count


# ---------------------------------------------------------------------------
# selected implementations

if USE_NUMBA:
    bfs_distances = nb_bfs_distances
    farness = nb_farness
    ring_stats = nb_ring_stats
    distance_histogram = nb_distance_histogram
    triangle_counts = nb_triangle_counts
    row_sums = nb_row_sums
    col_scatter = nb_col_scatter
    fista = nb_fista
    frontier_walk = nb_frontier_walk
    uniform_walk = nb_uniform_walk
else:
    bfs_distances = np_bfs_distances
    farness = np_farness
    ring_stats = np_ring_stats
    distance_histogram = np_distance_histogram
    triangle_counts = np_triangle_counts
    row_sums = np_row_sums
    col_scatter = np_col_scatter
    fista = np_fista
    frontier_walk = np_frontier_walk
    uniform_walk = np_uniform_walk
