"""Undirected simple graphs in CSR adjacency form, plus ingestion and stats."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K


class GraphError(ValueError):
    """Invalid graph input or an operation applied to an unsuitable graph."""


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph.

    Node ids are contiguous integers 0..n-1. `indptr`/`indices` form a CSR
    adjacency with each neighbor segment sorted ascending. Safe to share
    across threads.
    """

    indptr: np.ndarray
    indices: np.ndarray

    @property
    def node_count(self) -> int:
        return self.indptr.shape[0] - 1

    @property
    def edge_count(self) -> int:
        return self.indices.shape[0] // 2

    @property
    def max_degree(self) -> int:
        if self.node_count == 0:
            return 0
        return int(np.max(self.degrees))

    @property
    def degrees(self) -> np.ndarray:
        return (self.indptr[1:] - self.indptr[:-1]).astype(np.int64)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]: self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        seg = self.neighbors(u)
        i = np.searchsorted(seg, v)
        return i < seg.shape[0] and seg[i] == v

    def edge_array(self) -> np.ndarray:
        """All edges as an (E, 2) array with u < v, sorted lexicographically."""
        u = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degrees)
        v = self.indices
        keep = u < v
        return np.column_stack((u[keep], v[keep]))

    def validate(self) -> None:
        """Check structural invariants; raises GraphError on violation."""
        n = self.node_count
        if self.indptr[0] != 0 or self.indptr[-1] != self.indices.shape[0]:
            raise GraphError("corrupt indptr")
        if np.any(np.diff(self.indptr) < 0):
            raise GraphError("indptr not monotone")
        if n and self.indices.size:
            if self.indices.min() < 0 or self.indices.max() >= n:
                raise GraphError("neighbor id out of range")
        for v in range(n):
            seg = self.neighbors(v)
            if np.any(np.diff(seg) <= 0):
                raise GraphError(f"adjacency of node {v} not strictly sorted")
            if np.any(seg == v):
                raise GraphError(f"self-loop at node {v}")
        ea = self.edge_array()
        for u, v in ea:
            if not self.has_edge(int(v), int(u)):
                raise GraphError(f"edge ({u},{v}) not symmetric")
        if 2 * self.edge_count != self.indices.shape[0]:
            raise GraphError("odd half-edge count")


def from_edges(edges: np.ndarray, node_count: int) -> Graph:
    """Build a Graph from an (E, 2) int array; loops and duplicates dropped."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.size:
        if edges.min() < 0 or edges.max() >= node_count:
            raise GraphError("edge endpoint out of range")
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        keep = lo != hi
        lo, hi = lo[keep], hi[keep]
        if lo.size:
            packed = np.unique(lo * np.int64(node_count) + hi)
            lo = packed // node_count
            hi = packed % node_count
    else:
        lo = hi = np.empty(0, dtype=np.int64)
    heads = np.concatenate((lo, hi))
    tails = np.concatenate((hi, lo))
    order = np.lexsort((tails, heads))
    heads, tails = heads[order], tails[order]
    indptr = np.zeros(node_count + 1, dtype=np.int64)
    if heads.size:
        indptr[1:] = np.cumsum(np.bincount(heads, minlength=node_count))
    return Graph(indptr=indptr, indices=tails)


def load_edge_list(source, directed: bool = False):
    """Parse a whitespace-separated edge list into a Graph.

    Lines starting with '#' are comments. Arbitrary non-negative integer ids
    are remapped to 0..n-1 in ascending order of the original id; the second
    return value maps each internal id back to its original id. Duplicate
    edges and self-loops are dropped; when `directed` is set, each arc is
    symmetrized.

    Returns (Graph, original_ids).
    """
    if isinstance(source, (str, bytes)):
        text = source.decode() if isinstance(source, bytes) else source
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        raw = source.read()
        text = raw.decode() if isinstance(raw, bytes) else raw
    else:
        raise TypeError("source must be a string, bytes, or readable stream")

    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) < 2:
            raise GraphError(f"line {lineno}: expected two ids, got {stripped!r}")
        try:
            u = int(parts[0])
            v = int(parts[1])
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer token in {stripped!r}") from None
        if u < 0 or v < 0:
            raise GraphError(f"line {lineno}: negative node id")
        pairs.append((u, v))
    if not pairs:
        raise GraphError("empty edge list")

    raw_edges = np.asarray(pairs, dtype=np.int64)
    original_ids = np.unique(raw_edges)
    remapped = np.searchsorted(original_ids, raw_edges)
    g = from_edges(remapped, node_count=original_ids.shape[0])
    return g, original_ids


def save_edge_list(g: Graph, path) -> None:
    """Write `g` as one `u v` pair per line (u < v, lexicographic order)."""
    ea = g.edge_array()
    with open(path, "w") as fh:
        for u, v in ea:
            fh.write(f"{u} {v}\n")


def connected_components(g: Graph) -> np.ndarray:
    """Label each node with a component id (ids ordered by smallest member)."""
    n = g.node_count
    labels = np.full(n, -1, dtype=np.int64)
    comp = 0
    for v in range(n):
        if labels[v] >= 0:
            continue
        dist = K.bfs_distances(g.indptr, g.indices, v)
        labels[dist >= 0] = comp
        comp += 1
    return labels


def largest_connected_component(g: Graph, return_nodes: bool = False):
    """Induced subgraph on the largest component, relabeled contiguously.

    Ties between equal-size components go to the one containing the smallest
    node id. Relabeling preserves the relative order of the kept ids; with
    `return_nodes` the kept (old) ids are returned alongside.
    """
    if g.node_count == 0:
        raise GraphError("empty graph has no components")
    labels = connected_components(g)
    sizes = np.bincount(labels)
    best = int(np.argmax(sizes))  # argmax takes the first max: smallest member id
    keep = np.flatnonzero(labels == best)
    new_id = np.full(g.node_count, -1, dtype=np.int64)
    new_id[keep] = np.arange(keep.shape[0], dtype=np.int64)
    ea = g.edge_array()
    if ea.size:
        mask = (labels[ea[:, 0]] == best) & (labels[ea[:, 1]] == best)
        sub_edges = new_id[ea[mask]]
    else:
        sub_edges = np.empty((0, 2), dtype=np.int64)
    sub = from_edges(sub_edges, node_count=keep.shape[0])
    if return_nodes:
        return sub, keep
    return sub


def is_connected(g: Graph) -> bool:
    if g.node_count == 0:
        return False
    dist = K.bfs_distances(g.indptr, g.indices, 0)
    return bool(np.all(dist >= 0))


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Hop distances from `source` as float64; unreachable nodes get inf."""
    if not 0 <= source < g.node_count:
        raise GraphError(f"source {source} out of range")
    raw = K.bfs_distances(g.indptr, g.indices, source)
    out = raw.astype(np.float64)
    out[raw < 0] = np.inf
    return out


def closeness_exact(g: Graph) -> np.ndarray:
    """Exact closeness (n-1) / sum of distances for every node.

    Requires a connected graph; run largest_connected_component first
    otherwise.
    """
    n = g.node_count
    if n < 2:
        raise GraphError("closeness needs at least 2 nodes")
    far, reach = K.farness(g.indptr, g.indices)
    if int(reach.min()) < n:
        raise GraphError(
            "graph is disconnected; extract the largest connected component first"
        )
    return (n - 1) / far.astype(np.float64)


@dataclass(frozen=True)
class NetworkStats:
    avg_degree: float
    avg_clustering: float
    diameter: int
    effective_diameter_90: float


def network_stats(g: Graph) -> NetworkStats:
    """Average degree, mean local clustering, diameter, 90% effective diameter.

    The effective diameter interpolates linearly on the cumulative
    pairwise-distance distribution: with F(d) the fraction of node pairs at
    distance <= d, it is the real d where F crosses 0.9. Connected graphs
    only.
    """
    n = g.node_count
    if n < 2:
        raise GraphError("stats need at least 2 nodes")
    if not is_connected(g):
        raise GraphError(
            "graph is disconnected; extract the largest connected component first"
        )
    avg_degree = 2.0 * g.edge_count / n

    tri = K.triangle_counts(g.indptr, g.indices)
    deg = g.degrees
    wedges = deg * (deg - 1) / 2.0
    local = np.zeros(n, dtype=np.float64)
    has = wedges > 0
    local[has] = tri[has] / wedges[has]
    avg_clustering = float(local.mean())

    hist, ecc = K.distance_histogram(g.indptr, g.indices)
    diameter = int(ecc.max())
    pair_counts = hist[1: diameter + 1].astype(np.float64) / 2.0
    cum = np.cumsum(pair_counts)
    total = cum[-1]
    target = 0.9 * total
    d_hi = int(np.searchsorted(cum, target))  # first index with cum >= target
    below = cum[d_hi - 1] if d_hi > 0 else 0.0
    at = pair_counts[d_hi]
    eff = d_hi + (target - below) / at  # distances are d_hi+1 at index d_hi
    return NetworkStats(
        avg_degree=avg_degree,
        avg_clustering=avg_clustering,
        diameter=diameter,
        effective_diameter_90=float(eff),
    )
