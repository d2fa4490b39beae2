"""Top-k closeness-central node recovery from local scores and compressive
graph measurements.

Pipeline: build or load an undirected graph, compute a cheap per-node
ego-closeness score from truncated BFS rings, aggregate those scores along
score-weighted frontier walks into a feasible binary measurement matrix,
recover an approximate score vector with an L1 solver, and read off the
top-k nodes.
"""

__version__ = "0.1.0"

from ._kernels import USE_NUMBA
from .graph import (Graph, GraphError, NetworkStats, bfs_distances,
                    closeness_exact, from_edges, largest_connected_component,
                    load_edge_list, network_stats)
from .generators import gen_ba, gen_er, gen_ws
from .metrics import (daccer_vol, degree_scores, dist_exact_score,
                      ego_closeness, ego_rings)
from .measure import (MeasurementSystem, build_matrix, build_matrix_dicenod,
                      build_matrix_rw, build_matrix_topcent,
                      build_measurement, load_measurements,
                      save_measurements, verify_feasibility)
from .recover import (RecoveryError, RecoveryResult, kkt_residual,
                      lasso_solve, top_k, top_k_ids)
from .evaluate import (EvalError, EvalReport, SweepConfig, f_measure,
                       log_pearson, pearson, precision_recall,
                       run_experiment, topk_pearson)

__all__ = [
    "USE_NUMBA",
    "Graph", "GraphError", "NetworkStats", "bfs_distances", "closeness_exact",
    "from_edges", "largest_connected_component", "load_edge_list",
    "network_stats",
    "gen_ba", "gen_er", "gen_ws",
    "daccer_vol", "degree_scores", "dist_exact_score", "ego_closeness",
    "ego_rings",
    "MeasurementSystem", "build_matrix", "build_matrix_dicenod",
    "build_matrix_rw", "build_matrix_topcent", "build_measurement",
    "load_measurements", "save_measurements", "verify_feasibility",
    "RecoveryError", "RecoveryResult", "kkt_residual", "lasso_solve",
    "top_k", "top_k_ids",
    "EvalError", "EvalReport", "SweepConfig", "f_measure", "log_pearson",
    "pearson", "precision_recall", "run_experiment", "topk_pearson",
]
