"""Correlation studies, precision/recall/F scoring, and the repeat harness.

`run_experiment` drives the full pipeline per seed (generate/load graph,
local scores, measurement matrix, recovery, top-k match against exact
closeness) and aggregates repetitions with asymmetric standard deviations:
the spread is reported separately for values above and below the mean.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from .graph import Graph, largest_connected_component, load_edge_list, closeness_exact
from .generators import gen_ba, gen_er, gen_ws
from .metrics import compute_metric, DEFAULT_RADIUS
from . import measure as M
from .recover import lasso_solve, top_k_ids, DEFAULT_LAMBDA


class EvalError(ValueError):
    pass


# ---------------------------------------------------------------------------
# correlation and set-overlap scores

def pearson(x, y) -> float:
    """Product-moment correlation; raises EvalError on zero variance."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise EvalError("pearson needs two equal-length vectors")
    if x.shape[0] < 2:
        raise EvalError("pearson needs at least 2 points")
    dx = x - x.mean()
    dy = y - y.mean()
    ssx = float(dx @ dx)
    ssy = float(dy @ dy)
    if ssx == 0.0 or ssy == 0.0:
        raise EvalError("correlation undefined: an input has zero variance")
    return float((dx @ dy) / math.sqrt(ssx * ssy))


def log_pearson(x, y, shift_zeros: bool = False) -> float:
    """Pearson on elementwise logs; captures monotone nonlinear association.

    Entries must be positive. With `shift_zeros`, a vector containing zeros
    is shifted by 1e-9 * its max before logging (negatives always error).
    """
    out = []
    for v in (np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)):
        if np.any(v < 0):
            raise EvalError("log correlation needs non-negative entries")
        if np.any(v == 0):
            if not shift_zeros:
                raise EvalError(
                    "log correlation needs positive entries (or shift_zeros=True)"
                )
            v = v + 1e-9 * v.max()
            if np.any(v == 0):
                raise EvalError("cannot shift an all-zero vector")
        out.append(np.log(v))
    return pearson(out[0], out[1])


def topk_pearson(local, global_scores, k: int) -> float:
    """Correlation restricted to the ground-truth top-k by the global score."""
    global_scores = np.asarray(global_scores, dtype=np.float64)
    idx = top_k_ids(global_scores, k)
    return pearson(np.asarray(local, dtype=np.float64)[idx], global_scores[idx])


def precision_recall(detected, truth):
    """(precision, recall) of detected vs. ground-truth node sets."""
    detected = set(int(v) for v in detected)
    truth = set(int(v) for v in truth)
    if not truth:
        raise EvalError("truth set must be non-empty")
    overlap = len(detected & truth)
    p = overlap / len(detected) if detected else 0.0
    r = overlap / len(truth)
    return p, r


def f_measure(p: float, r: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if p + r == 0.0:
        return 0.0
    return 2.0 * p * r / (p + r)


def asym_std(values):
    """(std_lo, std_hi): rms deviation of values below / above their mean."""
    values = np.asarray(values, dtype=np.float64)
    mu = values.mean()
    lo = values[values < mu]
    hi = values[values > mu]
    std_lo = float(np.sqrt(np.mean((lo - mu) ** 2))) if lo.size else 0.0
    std_hi = float(np.sqrt(np.mean((hi - mu) ** 2))) if hi.size else 0.0
    return std_lo, std_hi


# ---------------------------------------------------------------------------
# experiment configuration and execution

def resolve_count(value, n: int) -> int:
    """Fractions (floats in (0,1]) scale by n with half-up rounding; ints pass."""
    if isinstance(value, float):
        if not 0.0 < value <= 1.0:
            raise EvalError(f"fractional parameter must be in (0,1], got {value}")
        return int(math.floor(value * n + 0.5))
    return int(value)


@dataclass
class SweepConfig:
    model: str = "ba"            # ba | er | ws | file
    n: int = 500
    attach: int = 5
    avg_deg: float = 16.0        # er: p = avg_deg / (n-1)
    p: float | None = None       # er: explicit override of avg_deg
    k_nbrs: int = 8
    rewire: float = 0.2
    graph: str | None = None     # model == file
    metric: str = "ego"
    h: int = DEFAULT_RADIUS
    builder: str = "hiclose"
    m: object = 0.4
    l: object = 0.25
    k: object = 0.15
    d: float | None = None       # dicenod column weight; default from l
    lam: float = DEFAULT_LAMBDA
    nonneg: bool = True
    seed: int = 42
    reps: int = 10
    seeds: list = field(default_factory=list)
    sweep: str | None = None     # one of m | l | k
    sweep_values: list = field(default_factory=list)

    def seed_list(self):
        if self.seeds:
            return [int(s) for s in self.seeds]
        return list(range(self.seed, self.seed + self.reps))

    def validate(self):
        if self.model not in ("ba", "er", "ws", "file"):
            raise EvalError(f"unknown model {self.model!r}")
        if self.model == "file" and not self.graph:
            raise EvalError("model 'file' needs a graph path")
        if self.builder not in M.BUILDERS:
            raise EvalError(f"unknown builder {self.builder!r}")
        if self.sweep is not None:
            if self.sweep not in ("m", "l", "k"):
                raise EvalError(f"can only sweep m, l or k, not {self.sweep!r}")
            if not self.sweep_values:
                raise EvalError("sweep requires sweep_values")
        if not self.seed_list():
            raise EvalError("need at least one seed")


@dataclass
class EvalReport:
    precision: float
    recall: float
    f_measure: float
    pearson: float
    repetitions: list
    std_lo: dict
    std_hi: dict

    @classmethod
    def from_runs(cls, runs):
        cols = {name: [r[name] for r in runs]
                for name in ("precision", "recall", "f_measure", "pearson")}
        std_lo = {}
        std_hi = {}
        for name, vals in cols.items():
            std_lo[name], std_hi[name] = asym_std(vals)
        return cls(
            precision=float(np.mean(cols["precision"])),
            recall=float(np.mean(cols["recall"])),
            f_measure=float(np.mean(cols["f_measure"])),
            pearson=float(np.mean(cols["pearson"])),
            repetitions=list(runs),
            std_lo=std_lo,
            std_hi=std_hi,
        )


def build_graph_for(cfg: SweepConfig, seed: int) -> Graph:
    """Instantiate the configured graph and reduce to its largest component."""
    if cfg.model == "ba":
        g = gen_ba(cfg.n, cfg.attach, seed)
    elif cfg.model == "er":
        p = cfg.p if cfg.p is not None else cfg.avg_deg / (cfg.n - 1)
        g = gen_er(cfg.n, p, seed)
    elif cfg.model == "ws":
        g = gen_ws(cfg.n, cfg.k_nbrs, cfg.rewire, seed)
    else:
        with open(cfg.graph) as fh:
            g, _ = load_edge_list(fh.read())
    return largest_connected_component(g)


def _build_measurements(cfg, g, scores, m_abs, l_abs, seed):
    if cfg.builder == "hiclose":
        return M.build_matrix(g, scores, m_abs, l_abs, seed)
    if cfg.builder == "rw":
        return M.build_matrix_rw(g, scores, m_abs, l_abs, seed)
    if cfg.builder == "topcent":
        return M.build_matrix_topcent(g, scores, m_abs, l_abs, seed)
    d = cfg.d if cfg.d is not None else M.dicenod_d_for_mean_row_size(
        l_abs + 1, g.node_count, m_abs)
    return M.build_matrix_dicenod(g, scores, m_abs, d, seed)


def run_single(cfg: SweepConfig, seed: int, graph: Graph = None,
               truth_scores: np.ndarray = None) -> dict:
    """One full pipeline repetition; returns the per-seed score row."""
    g = graph if graph is not None else build_graph_for(cfg, seed)
    truth = truth_scores if truth_scores is not None else closeness_exact(g)
    n = g.node_count
    m_abs = resolve_count(cfg.m, n)
    l_abs = resolve_count(cfg.l, n)
    k_abs = resolve_count(cfg.k, n)
    scores = compute_metric(g, cfg.metric, cfg.h)
    ms = _build_measurements(cfg, g, scores, m_abs, l_abs, seed)
    res = lasso_solve(ms, lam=cfg.lam, nonneg=cfg.nonneg)
    detected = top_k_ids(res.x_hat, k_abs)
    truth_ids = top_k_ids(truth, k_abs)
    p, r = precision_recall(detected, truth_ids)
    return {
        "seed": seed,
        "precision": p,
        "recall": r,
        "f_measure": f_measure(p, r),
        "pearson": pearson(scores, truth),
        "m": m_abs,
        "l": l_abs,
        "k": k_abs,
        "converged": res.converged,
        "iterations": res.iterations,
    }


def worker_count() -> int:
    cap = os.environ.get("TOPCLOSE_WORKERS")
    cpus = os.cpu_count() or 1
    if cap:
        try:
            return max(1, min(int(cap), cpus))
        except ValueError:
            pass
    return max(1, min(4, cpus))


def run_experiment(cfg: SweepConfig, checkpoint: dict = None, on_result=None):
    """Run every (sweep value, seed) pair; returns [(value, EvalReport)].

    Without a sweep the single point is reported under value None. Pairs
    already present in `checkpoint` (keyed "value:seed") are reused, which is
    how partial sweeps resume. `on_result` fires after each fresh run with
    (key, row) for checkpointing.
    """
    cfg.validate()
    seeds = cfg.seed_list()
    values = cfg.sweep_values if cfg.sweep else [None]
    checkpoint = checkpoint or {}

    file_graph = None
    file_truth = None
    if cfg.model == "file":
        file_graph = build_graph_for(cfg, seeds[0])
        file_truth = closeness_exact(file_graph)

    tasks = []
    for value in values:
        sub = _with_value(cfg, value)
        for seed in seeds:
            key = f"{value}:{seed}"
            tasks.append((value, seed, sub, key))

    def execute(task):
        value, seed, sub, key = task
        if key in checkpoint:
            return key, checkpoint[key], False
        row = run_single(sub, seed, graph=file_graph, truth_scores=file_truth)
        return key, row, True

    results = {}
    workers = worker_count()
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(execute, tasks))
    else:
        outs = [execute(t) for t in tasks]
    for key, row, fresh in outs:
        results[key] = row
        if fresh and on_result is not None:
            on_result(key, row)

    reports = []
    for value in values:
        runs = [results[f"{value}:{seed}"] for seed in seeds]
        reports.append((value, EvalReport.from_runs(runs)))
    return reports


def _with_value(cfg: SweepConfig, value):
    if value is None or cfg.sweep is None:
        return cfg
    patch = dict(asdict(cfg))
    patch[cfg.sweep] = value
    return SweepConfig(**patch)


# ---------------------------------------------------------------------------
# CSV emission (schema shared by the eval and sweep commands)

def report_rows(cfg: SweepConfig, reports):
    """Per-seed rows and aggregate rows for the two output CSVs."""
    param = cfg.sweep or "none"
    per_seed = [["sweep_param", "value", "seed", "precision", "recall", "f_measure"]]
    agg = [["sweep_param", "value"]]
    for name in ("precision", "recall", "f_measure"):
        agg[0] += [f"{name}_mean", f"{name}_std_lo", f"{name}_std_hi"]
    for value, rep in reports:
        vtxt = "na" if value is None else repr(value)
        for run in rep.repetitions:
            per_seed.append([param, vtxt, str(run["seed"]),
                             repr(run["precision"]), repr(run["recall"]),
                             repr(run["f_measure"])])
        row = [param, vtxt]
        for name in ("precision", "recall", "f_measure"):
            row += [repr(getattr(rep, name)), repr(rep.std_lo[name]),
                    repr(rep.std_hi[name])]
        agg.append(row)
    return per_seed, agg


def write_csv(rows, path: str) -> None:
    with open(path, "w") as fh:
        for row in rows:
            fh.write(",".join(row) + "\n")


# ---------------------------------------------------------------------------
# key=value config files (used by the sweep command; flags override these)

_LIST_KEYS = {"seeds", "sweep_values"}
_INT_KEYS = {"n", "attach", "k_nbrs", "h", "seed", "reps"}
_FLOAT_KEYS = {"avg_deg", "p", "rewire", "d", "lam", "lambda"}
_BOOL_KEYS = {"nonneg"}
_COUNT_KEYS = {"m", "l", "k"}  # int = absolute count, decimal = fraction of |V|


def parse_count_token(tok: str):
    tok = tok.strip()
    if "." in tok or "e" in tok.lower():
        return float(tok)
    return int(tok)


def _parse_scalar(key: str, tok: str):
    tok = tok.strip().strip('"').strip("'")
    if key in _BOOL_KEYS:
        return tok.lower() in ("1", "true", "yes", "on")
    if key in _INT_KEYS:
        return int(tok)
    if key in _FLOAT_KEYS:
        return float(tok)
    if key in _COUNT_KEYS:
        return parse_count_token(tok)
    return tok


def parse_config_text(text: str) -> dict:
    """Parse `key = value` lines; '#' comments; lists as [a, b, c]."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise EvalError(f"config line {lineno}: expected key = value")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key == "lambda":
            key = "lam"
        if key in _LIST_KEYS or (raw.startswith("[") and raw.endswith("]")):
            inner = raw.strip()
            if inner.startswith("[") and inner.endswith("]"):
                inner = inner[1:-1]
            items = [t for t in (s.strip() for s in inner.split(",")) if t]
            if key == "seeds":
                out[key] = [int(t) for t in items]
            elif key == "sweep_values":
                out[key] = [parse_count_token(t) for t in items]
            else:
                out[key] = items
        else:
            out[key] = _parse_scalar(key, raw)
    return out


def config_from_dict(data: dict) -> SweepConfig:
    allowed = set(SweepConfig.__dataclass_fields__)
    unknown = set(data) - allowed
    if unknown:
        raise EvalError(f"unknown config keys: {sorted(unknown)}")
    return SweepConfig(**data)
