"""Command-line pipeline: gen, stats, metric, measure, recover, eval, sweep.

Every command that writes artifacts also writes `<out>.manifest.json` with
the resolved configuration, master seed, input digests, and library versions,
which is enough to re-produce the artifact bytes. Usage problems (bad flags,
missing or malformed inputs) exit with 2; runtime failures exit with 1; both
print a one-line JSON error to stderr.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from . import _kernels as K
from . import measure as M
from .evaluate import (EvalError, SweepConfig, config_from_dict,
                       parse_config_text, parse_count_token, report_rows,
                       run_experiment, write_csv)
from .generators import gen_ba, gen_er, gen_ws
from .graph import (GraphError, largest_connected_component, load_edge_list,
                    network_stats, save_edge_list)
from .metrics import METRICS, compute_metric
from .recover import RecoveryError, kkt_residual, lasso_solve

USAGE_EXIT = 2
RUNTIME_EXIT = 1


class UsageError(Exception):
    pass


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _read_input(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read input file {path}: {e}") from None


def _load_graph(path: str):
    """Load an edge list and reduce to the largest connected component."""
    text = _read_input(path)
    try:
        g, original_ids = load_edge_list(text)
    except GraphError as e:
        raise UsageError(f"{path}: {e}") from None
    lcc, kept = largest_connected_component(g, return_nodes=True)
    return lcc, original_ids[kept]


def _write_nodemap(path: str, original_ids: np.ndarray) -> None:
    ids = np.asarray(original_ids)
    if np.array_equal(ids, np.arange(ids.shape[0])):
        return  # identity mapping: nothing worth reporting
    with open(path + ".nodemap.csv", "w") as fh:
        fh.write("node_id,original_id\n")
        for i, o in enumerate(ids):
            fh.write(f"{i},{int(o)}\n")


def _write_manifest(out_path: str, args, inputs=(), extra=None) -> None:
    try:
        import numba
        numba_version = numba.__version__
    except ImportError:  # pragma: no cover
        numba_version = None
    manifest = {
        "command": list(getattr(args, "_argv", [])),
        "config": {k: v for k, v in sorted(vars(args).items())
                   if not k.startswith("_") and k != "func" and _jsonable(v)},
        "master_seed": getattr(args, "seed", None),
        "versions": {
            "topclose": __version__,
            "numpy": np.__version__,
            "numba": numba_version,
            "numba_kernels_active": K.USE_NUMBA,
        },
        "input_digests": {p: _sha256(p) for p in inputs if os.path.exists(p)},
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    if extra:
        manifest.update(extra)
    with open(out_path + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _jsonable(v) -> bool:
    return isinstance(v, (str, int, float, bool, list, tuple, type(None)))


# ---------------------------------------------------------------------------
# subcommands

def cmd_gen(args) -> None:
    if args.model == "ba":
        if args.attach is None:
            raise UsageError("--model ba needs --attach")
        g = gen_ba(args.n, args.attach, args.seed)
    elif args.model == "er":
        if args.p is None:
            raise UsageError("--model er needs --p")
        g = gen_er(args.n, args.p, args.seed)
    elif args.model == "ws":
        g = gen_ws(args.n, args.k_nbrs, args.rewire, args.seed)
    else:
        raise UsageError(f"unknown model {args.model!r}")
    save_edge_list(g, args.out)
    _write_manifest(args.out, args)


def cmd_stats(args) -> None:
    g, _ = _load_graph(args.graph)
    st = network_stats(g)
    lines = ["nodes,edges,avg_deg,avg_cc,diameter,eff_diameter_90",
             f"{g.node_count},{g.edge_count},{st.avg_degree!r},"
             f"{st.avg_clustering!r},{st.diameter},{st.effective_diameter_90!r}"]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        _write_manifest(args.out, args, inputs=[args.graph])
    else:
        sys.stdout.write(text)


def cmd_metric(args) -> None:
    g, original_ids = _load_graph(args.graph)
    scores = compute_metric(g, args.metric, args.h)
    with open(args.out, "w") as fh:
        fh.write("node_id,score\n")
        for i, s in enumerate(scores):
            fh.write(f"{i},{float(s)!r}\n")
    _write_nodemap(args.out, original_ids)
    _write_manifest(args.out, args, inputs=[args.graph])


def cmd_measure(args) -> None:
    g, original_ids = _load_graph(args.graph)
    scores = compute_metric(g, args.metric, args.h)
    m = _resolve(args.m, g.node_count, "m")
    l = _resolve(args.l, g.node_count, "l")
    if args.builder == "hiclose":
        ms = M.build_matrix(g, scores, m, l, args.seed)
    elif args.builder == "rw":
        ms = M.build_matrix_rw(g, scores, m, l, args.seed)
    elif args.builder == "topcent":
        ms = M.build_matrix_topcent(g, scores, m, l, args.seed)
    elif args.builder == "dicenod":
        d = args.d if args.d is not None else M.dicenod_d_for_mean_row_size(
            l + 1, g.node_count, m)
        ms = M.build_matrix_dicenod(g, scores, m, d, args.seed)
    else:
        raise UsageError(f"unknown builder {args.builder!r}")
    ms.meta["score_metric"] = args.metric
    ms.meta["h"] = args.h
    M.save_measurements(ms, args.out)
    _write_nodemap(args.out, original_ids)
    _write_manifest(args.out, args, inputs=[args.graph])


def cmd_recover(args) -> None:
    if not os.path.exists(args.matrix) or not os.path.exists(args.matrix + ".json"):
        raise UsageError(f"matrix file or sidecar missing: {args.matrix}(.json)")
    try:
        ms = M.load_measurements(args.matrix)
    except (ValueError, KeyError) as e:
        raise UsageError(f"malformed measurement file {args.matrix}: {e}") from None
    res = lasso_solve(ms, lam=args.lam, nonneg=bool(args.nonneg))
    with open(args.out, "w") as fh:
        fh.write("node_id,value\n")
        for i, v in enumerate(res.x_hat):
            fh.write(f"{i},{float(v)!r}\n")
    summary = {
        "objective": res.objective_value,
        "iterations": res.iterations,
        "converged": res.converged,
        "kkt_residual": kkt_residual(ms, res.x_hat, args.lam, nonneg=bool(args.nonneg)),
    }
    with open(args.out + ".summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(args.out, args, inputs=[args.matrix, args.matrix + ".json"])


def _config_from_args(args, base: dict = None) -> SweepConfig:
    data = dict(base or {})
    for key in ("model", "n", "attach", "p", "k_nbrs", "rewire", "graph",
                "metric", "h", "builder", "m", "l", "k", "d", "lam",
                "seed", "reps"):
        v = getattr(args, key, None)
        if v is not None:
            data[key] = v
    if getattr(args, "nonneg", None) is not None:
        data["nonneg"] = bool(args.nonneg)
    try:
        cfg = config_from_dict(data)
        cfg.validate()
    except (EvalError, TypeError) as e:
        raise UsageError(str(e)) from None
    return cfg


def _run_harness(cfg: SweepConfig, out: str, args, inputs=()) -> None:
    ckpt_path = out + ".ckpt.jsonl"
    checkpoint = {}
    if os.path.exists(ckpt_path):
        with open(ckpt_path) as fh:
            for line in fh:
                if line.strip():
                    rec = json.loads(line)
                    checkpoint[rec["key"]] = rec["row"]
    ckpt_fh = open(ckpt_path, "a")

    def on_result(key, row):
        ckpt_fh.write(json.dumps({"key": key, "row": row}) + "\n")
        ckpt_fh.flush()

    try:
        reports = run_experiment(cfg, checkpoint=checkpoint, on_result=on_result)
    finally:
        ckpt_fh.close()
    per_seed, agg = report_rows(cfg, reports)
    write_csv(per_seed, out)
    write_csv(agg, _agg_path(out))
    os.remove(ckpt_path)
    _write_manifest(out, args, inputs=inputs,
                    extra={"resolved_config": _cfg_dict(cfg)})


def _agg_path(out: str) -> str:
    root, ext = os.path.splitext(out)
    return f"{root}.agg{ext or '.csv'}"


def _cfg_dict(cfg: SweepConfig) -> dict:
    from dataclasses import asdict
    return asdict(cfg)


def cmd_eval(args) -> None:
    cfg = _config_from_args(args)
    inputs = [cfg.graph] if cfg.graph else []
    _run_harness(cfg, args.out, args, inputs=inputs)


def cmd_sweep(args) -> None:
    base = {}
    inputs = []
    if args.config:
        base = parse_config_text(_read_input(args.config))
        inputs.append(args.config)
    try:
        cfg = _config_from_args(args, base=base)
    except UsageError:
        raise
    if cfg.graph:
        inputs.append(cfg.graph)
    _run_harness(cfg, args.out, args, inputs=inputs)


# ---------------------------------------------------------------------------
# parser

def _resolve(value, n: int, name: str) -> int:
    from .evaluate import resolve_count
    try:
        return resolve_count(value, n)
    except EvalError as e:
        raise UsageError(f"--{name}: {e}") from None


def _count(text: str):
    try:
        return parse_count_token(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected int or fraction, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="topclose",
        description="Recover top-k closeness-central nodes from local scores "
                    "and compressive graph measurements.",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        return p

    p = add("gen", cmd_gen, "generate a synthetic graph edge list")
    p.add_argument("--model", required=True, choices=["ba", "er", "ws"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--attach", type=int, help="ba: edges per new node")
    p.add_argument("--p", type=float, help="er: edge probability")
    p.add_argument("--k-nbrs", dest="k_nbrs", type=int, default=8,
                   help="ws: ring neighbors (even)")
    p.add_argument("--rewire", type=float, default=0.2, help="ws: rewiring prob")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("-o", "--out", required=True)

    p = add("stats", cmd_stats, "network statistics CSV (on the largest component)")
    p.add_argument("--graph", required=True)
    p.add_argument("-o", "--out")

    p = add("metric", cmd_metric, "per-node local centrality CSV")
    p.add_argument("--graph", required=True)
    p.add_argument("--metric", choices=list(METRICS), default="ego")
    p.add_argument("--h", type=int, default=2)
    p.add_argument("-o", "--out", required=True)

    p = add("measure", cmd_measure, "build a measurement matrix + sidecar")
    p.add_argument("--graph", required=True)
    p.add_argument("--builder", choices=list(M.BUILDERS), default="hiclose")
    p.add_argument("--metric", choices=list(METRICS), default="ego")
    p.add_argument("--h", type=int, default=2)
    p.add_argument("--m", type=_count, required=True,
                   help="measurements: int count or fraction of |V|")
    p.add_argument("--l", type=_count, required=True,
                   help="walk length: int count or fraction of |V|")
    p.add_argument("--d", type=float, help="dicenod column weight")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("-o", "--out", required=True)

    p = add("recover", cmd_recover, "solve the sparse recovery problem")
    p.add_argument("--matrix", required=True, help="measurement file from 'measure'")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--nonneg", type=int, choices=[0, 1], default=1)
    p.add_argument("-o", "--out", required=True)

    def add_eval_flags(p, with_defaults):
        dv = (lambda v: v) if with_defaults else (lambda v: None)
        p.add_argument("--model", choices=["ba", "er", "ws", "file"],
                       default=dv("ba"))
        p.add_argument("--graph", help="edge list when --model file")
        p.add_argument("--n", type=int, default=dv(500))
        p.add_argument("--attach", type=int, default=dv(5))
        p.add_argument("--p", type=float)
        p.add_argument("--k-nbrs", dest="k_nbrs", type=int, default=dv(8))
        p.add_argument("--rewire", type=float, default=dv(0.2))
        p.add_argument("--metric", choices=list(METRICS), default=dv("ego"))
        p.add_argument("--h", type=int, default=dv(2))
        p.add_argument("--builder", choices=list(M.BUILDERS), default=dv("hiclose"))
        p.add_argument("--m", type=_count, default=dv(0.4))
        p.add_argument("--l", type=_count, default=dv(0.25))
        p.add_argument("--k", type=_count, default=dv(0.15))
        p.add_argument("--d", type=float)
        p.add_argument("--lambda", dest="lam", type=float, default=dv(1.0))
        p.add_argument("--nonneg", type=int, choices=[0, 1], default=dv(1))
        p.add_argument("--seed", type=int, default=dv(42))
        p.add_argument("--reps", type=int, default=dv(10))
        p.add_argument("-o", "--out", required=True)

    p = add("eval", cmd_eval, "run the repeated end-to-end experiment")
    add_eval_flags(p, with_defaults=True)

    p = add("sweep", cmd_sweep, "sweep m, l or k per a config file")
    p.add_argument("--config", help="key=value config file")
    add_eval_flags(p, with_defaults=False)

    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = argv
    try:
        args.func(args)
        return 0
    except UsageError as e:
        sys.stderr.write(json.dumps({"error": "usage", "message": str(e)}) + "\n")
        return USAGE_EXIT
    except (GraphError, EvalError, RecoveryError, OSError, ValueError) as e:
        sys.stderr.write(json.dumps(
            {"error": type(e).__name__, "message": str(e)}) + "\n")
        return RUNTIME_EXIT


if __name__ == "__main__":
    sys.exit(main())
