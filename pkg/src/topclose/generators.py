"""Seeded synthetic graph generators: preferential attachment, G(n,p), small world.

All three are deterministic given (params, seed): the same inputs yield a
byte-identical edge set.
"""

from __future__ import annotations

import numpy as np

from .graph import Graph, GraphError, from_edges


def gen_ba(n: int, m_attach: int, seed: int) -> Graph:
    """Preferential-attachment graph seeded with an m_attach-clique.

    Each of the n - m_attach later nodes attaches to m_attach distinct
    existing nodes chosen with probability proportional to current degree.
    Always connected.
    """
    if not (n > m_attach >= 1):
        raise GraphError(f"need n > m_attach >= 1, got n={n}, m_attach={m_attach}")
    rng = np.random.default_rng(seed)
    edges = []
    # degree-weighted sampling via the repeated-endpoints urn
    urn = []
    for u in range(m_attach):
        for v in range(u + 1, m_attach):
            edges.append((u, v))
            urn.append(u)
            urn.append(v)
    for u in range(m_attach, n):
        targets = set()
        if not urn:  # m_attach == 1: the lone seed node has degree 0
            targets.add(int(rng.integers(0, u)))
        while len(targets) < m_attach:
            targets.add(urn[rng.integers(0, len(urn))])
        for v in sorted(targets):
            edges.append((u, v))
            urn.append(u)
            urn.append(v)
    return from_edges(np.asarray(edges, dtype=np.int64), node_count=n)


def gen_er(n: int, p: float, seed: int) -> Graph:
    """G(n, p): each of the C(n,2) pairs appears independently with prob p.

    Uses geometric gap-skipping over the linearized upper triangle, so the
    cost is O(E) rather than O(n^2).
    """
    if n < 2:
        raise GraphError(f"need n >= 2, got n={n}")
    if not (0.0 < p <= 1.0):
        raise GraphError(f"need 0 < p <= 1, got p={p}")
    total = n * (n - 1) // 2
    if p == 1.0:
        hits = np.arange(total, dtype=np.int64)
    else:
        rng = np.random.default_rng(seed)
        hits = []
        pos = -1
        # gaps between successes are Geometric(p) >= 1; draw in batches
        batch = max(256, int(total * p * 1.2) + 16)
        while True:
            gaps = rng.geometric(p, size=batch)
            jumps = pos + np.cumsum(gaps)
            inside = jumps[jumps < total]
            hits.append(inside)
            if inside.shape[0] < batch:
                break
            pos = int(jumps[-1])
        hits = np.concatenate(hits)
    # invert the linear index: pair t -> (u, v), rows of length n-1-u
    row_starts = np.cumsum(np.concatenate(([0], np.arange(n - 1, 0, -1, dtype=np.int64))))
    u = np.searchsorted(row_starts, hits, side="right") - 1
    v = hits - row_starts[u] + u + 1
    return from_edges(np.column_stack((u, v)), node_count=n)


def gen_ws(n: int, k_nbrs: int, p_rewire: float, seed: int) -> Graph:
    """Watts-Strogatz ring lattice with per-edge rewiring.

    Each node starts connected to its k_nbrs nearest ring neighbors (k_nbrs
    even); every clockwise lattice edge is rewired with probability p_rewire
    to a uniform non-loop, non-duplicate endpoint. Rewiring preserves the
    edge count n*k_nbrs/2 exactly.
    """
    if not (n > k_nbrs >= 1):
        raise GraphError(f"need n > k_nbrs >= 1, got n={n}, k_nbrs={k_nbrs}")
    if k_nbrs % 2 != 0:
        raise GraphError(f"ring lattice needs even k_nbrs, got {k_nbrs}")
    if not (0.0 <= p_rewire <= 1.0):
        raise GraphError(f"need 0 <= p_rewire <= 1, got {p_rewire}")
    rng = np.random.default_rng(seed)
    adj = [set() for _ in range(n)]
    for u in range(n):
        for j in range(1, k_nbrs // 2 + 1):
            v = (u + j) % n
            adj[u].add(v)
            adj[v].add(u)
    for j in range(1, k_nbrs // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            if rng.random() >= p_rewire:
                continue
            if len(adj[u]) >= n - 1:
                continue  # saturated node: no legal rewire target
            w = int(rng.integers(0, n))
            while w == u or w in adj[u]:
                w = int(rng.integers(0, n))
            adj[u].discard(v)
            adj[v].discard(u)
            adj[u].add(w)
            adj[w].add(u)
    edges = [(u, v) for u in range(n) for v in adj[u] if u < v]
    return from_edges(np.asarray(edges, dtype=np.int64), node_count=n)
