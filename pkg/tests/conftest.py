import numpy as np
import pytest

from topclose import from_edges, gen_ba, gen_er, gen_ws
from topclose.graph import Graph


def path_graph(n) -> Graph:
    return from_edges([(i, i + 1) for i in range(n - 1)], n)


def cycle_graph(n) -> Graph:
    return from_edges([(i, (i + 1) % n) for i in range(n)], n)


def star_graph(leaves) -> Graph:
    return from_edges([(0, i) for i in range(1, leaves + 1)], leaves + 1)


def complete_graph(n) -> Graph:
    return from_edges([(i, j) for i in range(n) for j in range(i + 1, n)], n)


def two_triangles() -> Graph:
    """Two disjoint triangles plus an isolated node."""
    return from_edges([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], 7)


@pytest.fixture
def p3():
    return path_graph(3)


@pytest.fixture
def c6():
    return cycle_graph(6)


@pytest.fixture
def star4():
    return star_graph(4)


@pytest.fixture
def k3():
    return complete_graph(3)


def graph_zoo():
    """Small connected graphs of assorted shapes for property tests."""
    return [
        ("p5", path_graph(5)),
        ("c6", cycle_graph(6)),
        ("star6", star_graph(6)),
        ("k5", complete_graph(5)),
        ("ba60", gen_ba(60, 3, 1)),
        ("er80", gen_er(80, 0.08, 2)),
        ("ws60", gen_ws(60, 4, 0.2, 3)),
    ]


@pytest.fixture(params=graph_zoo(), ids=lambda p: p[0])
def zoo_graph(request):
    return request.param[1]


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger JIT compilation before any timed assertions run."""
    import topclose as tc
    from topclose.measure import build_matrix
    from topclose.recover import lasso_solve

    g = gen_ba(30, 2, 0)
    tc.closeness_exact(g)
    tc.ego_closeness(g, 2)
    tc.network_stats(g)
    tc.bfs_distances(g, 0)
    ms = build_matrix(g, np.ones(30), 5, 4, 0)
    lasso_solve(ms, max_iter=50)
