"""Feasible binary measurement matrices over a graph.

A measurement is a row of a binary m x n matrix: the set of nodes it visits,
plus the additive aggregate of a per-node score vector over that set. Walk
builders grow each row as a connected set (start node plus l frontier
extensions), so every row induces a connected subgraph by construction. The
dicenod builder instead samples node membership independently and only
reports how often its rows come out connected.

Randomness: each row gets its own generator derived from (master seed, row
index), so rows can be built in any order (or in parallel) with identical
results.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .graph import Graph, GraphError

# selection floor so zero-score frontier nodes stay reachable without
# perturbing the distribution measurably
WEIGHT_FLOOR = 1e-12

BUILDERS = ("hiclose", "rw", "topcent", "dicenod")


@dataclass
class MeasurementSystem:
    """Sparse binary measurement matrix plus its aggregated values.

    row_supports holds sorted node-id arrays; y[i] is the sum of the build
    score vector over support i.
    """

    row_supports: list
    y: np.ndarray
    node_count: int
    walk_length: int
    num_measurements: int
    meta: dict = field(default_factory=dict)

    def rows_csr(self):
        """Concatenated supports as (indptr, cols) for matrix products."""
        sizes = np.fromiter((s.shape[0] for s in self.row_supports), dtype=np.int64,
                            count=len(self.row_supports))
        indptr = np.zeros(len(self.row_supports) + 1, dtype=np.int64)
        np.cumsum(sizes, out=indptr[1:])
        if indptr[-1] == 0:
            cols = np.empty(0, dtype=np.int64)
        else:
            cols = np.concatenate(self.row_supports).astype(np.int64)
        return indptr, cols


def _check_scores(g: Graph, scores: np.ndarray) -> np.ndarray:
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (g.node_count,):
        raise GraphError(
            f"scores length {scores.shape} does not match node count {g.node_count}"
        )
    if np.any(scores < 0):
        raise GraphError("scores must be non-negative")
    return scores


def _row_rng(seed: int, row: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, row]))


def build_measurement(g: Graph, scores: np.ndarray, start: int, l: int,
                      rng: np.random.Generator):
    """One score-weighted frontier walk from `start` with l extensions.

    Each extension draws the next node from the frontier with probability
    proportional to its score (cumulative-sum binary search). Stops early if
    the component is exhausted. Returns (sorted support, aggregated value).
    """
    scores = _check_scores(g, scores)
    if not 0 <= start < g.node_count:
        raise GraphError(f"start node {start} out of range")
    if l < 0:
        raise GraphError(f"walk length must be >= 0, got {l}")
    weights = np.maximum(scores, WEIGHT_FLOOR)
    uniforms = rng.random(l)
    visited, count = K.frontier_walk(g.indptr, g.indices, weights, start, l, uniforms)
    support = np.sort(visited[:count])
    return support, float(scores[support].sum())


def _assemble(g, supports, scores, l, m, meta) -> MeasurementSystem:
    y = np.array([float(scores[s].sum()) for s in supports], dtype=np.float64)
    return MeasurementSystem(
        row_supports=supports,
        y=y,
        node_count=g.node_count,
        walk_length=l,
        num_measurements=m,
        meta=meta,
    )


def _walk_matrix(g, scores, m, l, seed, kernel, builder, extra_meta=None):
    if m < 1:
        raise GraphError(f"need m >= 1 measurements, got {m}")
    if l < 0:
        raise GraphError(f"walk length must be >= 0, got {l}")
    scores = _check_scores(g, scores)
    weights = np.maximum(scores, WEIGHT_FLOOR)
    supports = []
    for i in range(m):
        rng = _row_rng(seed, i)
        start = int(rng.integers(0, g.node_count))
        uniforms = rng.random(l)
        if kernel is K.frontier_walk:
            visited, count = kernel(g.indptr, g.indices, weights, start, l, uniforms)
        else:
            visited, count = kernel(g.indptr, g.indices, start, l, uniforms)
        supports.append(np.sort(visited[:count]))
    meta = {"builder": builder, "seed": seed}
    if extra_meta:
        meta.update(extra_meta)
    return _assemble(g, supports, scores, l, m, meta)


def build_matrix(g: Graph, scores: np.ndarray, m: int, l: int, seed: int) -> MeasurementSystem:
    """m independent score-weighted frontier walks; starts drawn uniformly."""
    return _walk_matrix(g, scores, m, l, seed, K.frontier_walk, "hiclose")


def build_matrix_topcent(g: Graph, scores: np.ndarray, m: int, l: int, seed: int) -> MeasurementSystem:
    """Frontier walks weighted by degree; y still aggregates `scores`."""
    ms = _walk_matrix(g, g.degrees.astype(np.float64), m, l, seed, K.frontier_walk,
                      "topcent")
    scores = _check_scores(g, scores)
    ms.y = np.array([float(scores[s].sum()) for s in ms.row_supports])
    return ms


def build_matrix_rw(g: Graph, scores: np.ndarray, m: int, l: int, seed: int) -> MeasurementSystem:
    """Classic uniform random walks; revisits collapse into the binary support."""
    return _walk_matrix(g, scores, m, l, seed, K.uniform_walk, "rw")


def build_matrix_dicenod(g: Graph, scores: np.ndarray, m: int, d: float, seed: int) -> MeasurementSystem:
    """Independent Bernoulli membership: every node joins each row w.p. d/m.

    Connectivity is not enforced; check verify_feasibility for the realized
    feasible fraction. Expected row size is n*d/m.
    """
    if m < 1:
        raise GraphError(f"need m >= 1 measurements, got {m}")
    if not (0 < d <= m):
        raise GraphError(f"need 0 < d <= m, got d={d}, m={m}")
    scores = _check_scores(g, scores)
    prob = d / m
    supports = []
    for i in range(m):
        rng = _row_rng(seed, i)
        member = rng.random(g.node_count) < prob
        supports.append(np.flatnonzero(member).astype(np.int64))
    meta = {"builder": "dicenod", "seed": seed, "d": d}
    return _assemble(g, supports, scores, 0, m, meta)


def dicenod_d_for_mean_row_size(target_row_size: float, n: int, m: int) -> float:
    """d giving an expected row size of target_row_size (clipped to (0, m])."""
    if target_row_size <= 0:
        raise GraphError("target row size must be positive")
    return float(min(m, target_row_size * m / n))


def verify_feasibility(g: Graph, ms: MeasurementSystem):
    """Per-row connectivity of the induced support subgraph.

    A row is feasible iff its support is non-empty and induces a connected
    subgraph of g. Returns (bool array, feasible fraction).
    """
    flags = np.zeros(ms.num_measurements, dtype=bool)
    member = np.zeros(g.node_count, dtype=bool)
    for i, support in enumerate(ms.row_supports):
        if support.shape[0] == 0:
            continue
        if support.min() < 0 or support.max() >= g.node_count:
            raise GraphError(f"row {i} references an invalid node")
        member[support] = True
        # BFS restricted to the support
        stack = [int(support[0])]
        member[support[0]] = False
        reached = 1
        while stack:
            u = stack.pop()
            for v in g.neighbors(u):
                if member[v]:
                    member[v] = False
                    reached += 1
                    stack.append(int(v))
        flags[i] = reached == support.shape[0]
        member[support] = False
    return flags, float(flags.mean()) if ms.num_measurements else 0.0


# ---------------------------------------------------------------------------
# serialization: one `y_value: id id id ...` line per row, JSON sidecar

def save_measurements(ms: MeasurementSystem, path: str) -> None:
    with open(path, "w") as fh:
        for yv, support in zip(ms.y, ms.row_supports):
            ids = " ".join(str(int(j)) for j in support)
            fh.write(f"{float(yv)!r}: {ids}\n")
    sidecar = {
        "m": ms.num_measurements,
        "l": ms.walk_length,
        "n": ms.node_count,
    }
    sidecar.update(ms.meta)
    with open(path + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_measurements(path: str) -> MeasurementSystem:
    with open(path + ".json") as fh:
        sidecar = json.load(fh)
    supports = []
    ys = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            head, _, rest = line.partition(":")
            ys.append(float(head))
            ids = np.array([int(t) for t in rest.split()], dtype=np.int64)
            supports.append(ids)
    meta = {k: v for k, v in sidecar.items() if k not in ("m", "l", "n")}
    ms = MeasurementSystem(
        row_supports=supports,
        y=np.asarray(ys, dtype=np.float64),
        node_count=int(sidecar["n"]),
        walk_length=int(sidecar["l"]),
        num_measurements=int(sidecar["m"]),
        meta=meta,
    )
    if ms.num_measurements != len(supports):
        raise GraphError(
            f"sidecar says m={ms.num_measurements} but file has {len(supports)} rows"
        )
    return ms
