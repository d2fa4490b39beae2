import io

import numpy as np
import pytest

from topclose import (GraphError, bfs_distances, closeness_exact, from_edges,
                      gen_er, largest_connected_component, load_edge_list,
                      network_stats)
from topclose.graph import connected_components, is_connected, save_edge_list

from conftest import complete_graph, cycle_graph, path_graph, star_graph, two_triangles
from oracles import floyd_warshall, fw_closeness, union_find_components


def connected_gnp(n, p, seed):
    for s in range(seed, seed + 50):
        g = gen_er(n, p, s)
        if is_connected(g):
            return g
    raise AssertionError("no connected sample found")


class TestLoadEdgeList:
    def test_path(self):
        g, ids = load_edge_list("0 1\n1 2")
        assert g.node_count == 3
        assert g.edge_count == 2
        assert np.array_equal(ids, [0, 1, 2])

    def test_duplicates_and_loops_dropped(self):
        g, _ = load_edge_list("0 1\n1 0\n0 0")
        assert g.node_count == 2
        assert g.edge_count == 1

    def test_snap_style_header(self):
        text = "# Nodes: 4 Edges: 3\n# FromNodeId\tToNodeId\n10 20\n20 30\n30 77\n"
        g, ids = load_edge_list(text)
        # independent scan: distinct ids on non-comment lines
        distinct = set()
        for line in text.splitlines():
            if line.startswith("#") or not line.strip():
                continue
            distinct.update(int(t) for t in line.split())
        assert g.node_count == len(distinct)
        assert set(ids.tolist()) == distinct

    def test_remap_is_sorted(self):
        g, ids = load_edge_list("100 7\n7 42")
        assert np.array_equal(ids, [7, 42, 100])
        # node 0 is original 7, with neighbors {42, 100} -> internal {1, 2}
        assert set(g.neighbors(0).tolist()) == {1, 2}

    def test_malformed_line_reports_number(self):
        with pytest.raises(GraphError, match="line 2"):
            load_edge_list("0 1\n1 x")

    def test_missing_token(self):
        with pytest.raises(GraphError, match="line 1"):
            load_edge_list("42")

    def test_empty_input(self):
        with pytest.raises(GraphError, match="empty"):
            load_edge_list("# only comments\n")

    def test_stream_source(self):
        g, _ = load_edge_list(io.StringIO("0 1\n1 2"))
        assert g.node_count == 3

    def test_directed_symmetrized(self):
        g, _ = load_edge_list("0 1\n1 2\n2 1", directed=True)
        assert g.edge_count == 2

    def test_roundtrip(self, tmp_path):
        g = gen_er(40, 0.1, 5)
        path = tmp_path / "g.edges"
        save_edge_list(g, path)
        g2, _ = load_edge_list(path.read_text())
        assert np.array_equal(g.indptr, g2.indptr)
        assert np.array_equal(g.indices, g2.indices)


class TestValidation:
    def test_zoo_invariants(self, zoo_graph):
        zoo_graph.validate()
        assert zoo_graph.indices.shape[0] == 2 * zoo_graph.edge_count

    def test_out_of_range_edge(self):
        with pytest.raises(GraphError):
            from_edges([(0, 5)], 3)


class TestLargestComponent:
    def test_tie_break_smallest_id(self):
        g = two_triangles()
        sub = largest_connected_component(g)
        assert sub.node_count == 3
        assert sub.edge_count == 3
        # the kept component is the one containing node 0
        _, kept = largest_connected_component(g, return_nodes=True)
        assert np.array_equal(kept, [0, 1, 2])

    def test_idempotent(self):
        g = two_triangles()
        once = largest_connected_component(g)
        twice = largest_connected_component(once)
        assert np.array_equal(once.indptr, twice.indptr)
        assert np.array_equal(once.indices, twice.indices)

    def test_connected_graph_identity(self, c6):
        sub = largest_connected_component(c6)
        assert np.array_equal(sub.indptr, c6.indptr)
        assert np.array_equal(sub.indices, c6.indices)

    def test_against_union_find(self):
        g = gen_er(50, 0.02, 9)
        labels = union_find_components(g.edge_array(), g.node_count)
        sizes = np.bincount(labels, minlength=g.node_count)
        expected = int(sizes.max())
        sub = largest_connected_component(g)
        assert sub.node_count == expected

    def test_component_labels_match_union_find(self):
        g = gen_er(60, 0.03, 4)
        ours = connected_components(g)
        uf = union_find_components(g.edge_array(), g.node_count)
        # same partition: equal labels iff equal labels
        for a in range(0, g.node_count, 7):
            for b in range(g.node_count):
                assert (ours[a] == ours[b]) == (uf[a] == uf[b])


class TestBfs:
    def test_path_from_endpoint(self, p3):
        assert np.array_equal(bfs_distances(p3, 0), [0, 1, 2])

    def test_star_center(self, star4):
        assert np.array_equal(bfs_distances(star4, 0), [0, 1, 1, 1, 1])

    def test_unreachable_inf(self):
        g = two_triangles()
        d = bfs_distances(g, 0)
        assert np.all(np.isinf(d[3:]))

    def test_source_out_of_range(self, p3):
        with pytest.raises(GraphError):
            bfs_distances(p3, 3)

    def test_matches_floyd_warshall(self):
        g = connected_gnp(100, 0.05, 0)
        fw = floyd_warshall(g)
        for s in (0, 17, 99):
            assert np.array_equal(bfs_distances(g, s), fw[s])

    def test_triangle_inequality_sampled(self, zoo_graph):
        g = zoo_graph
        rng = np.random.default_rng(0)
        dists = {s: bfs_distances(g, s) for s in range(g.node_count)}
        for _ in range(50):
            a, b, c = rng.integers(0, g.node_count, 3)
            assert dists[int(a)][c] <= dists[int(a)][b] + dists[int(b)][c]


class TestCloseness:
    def test_star_center_is_one(self, star4):
        c = closeness_exact(star4)
        assert c[0] == 1.0

    def test_cycle6(self, c6):
        c = closeness_exact(c6)
        assert np.allclose(c, 5.0 / 9.0, atol=1e-15)

    def test_matches_fw(self):
        g = connected_gnp(100, 0.05, 3)
        assert np.allclose(closeness_exact(g), fw_closeness(g), atol=1e-12, rtol=0)

    def test_disconnected_raises(self):
        with pytest.raises(GraphError, match="largest connected component"):
            closeness_exact(two_triangles())

    def test_range_and_extreme(self, zoo_graph):
        g = zoo_graph
        c = closeness_exact(g)
        assert np.all(c > 0) and np.all(c <= 1.0)
        deg = g.degrees
        for v in range(g.node_count):
            assert (c[v] == 1.0) == (deg[v] == g.node_count - 1)


class TestNetworkStats:
    def test_triangle(self, k3):
        st = network_stats(k3)
        assert st.avg_degree == 2.0
        assert st.avg_clustering == 1.0
        assert st.diameter == 1

    def test_path3(self, p3):
        st = network_stats(p3)
        assert st.avg_clustering == 0.0
        assert st.diameter == 2

    def test_diameter_matches_fw(self):
        g = connected_gnp(200, 0.03, 7)
        st = network_stats(g)
        assert st.diameter == int(floyd_warshall(g).max())

    def test_effective_diameter_interpolation(self):
        # P3 distances: four pairs at 1, two at 2 (ordered); fractions 2/3, 1/3
        st = network_stats(path_graph(3))
        # F(1) = 2/3 < 0.9 <= F(2) -> 1 + (0.9 - 2/3) / (1/3) = 1.7
        assert st.effective_diameter_90 == pytest.approx(1.7, abs=1e-12)

    def test_effective_below_diameter(self, zoo_graph):
        st = network_stats(zoo_graph)
        assert st.effective_diameter_90 <= st.diameter

    def test_avg_degree_identity(self, zoo_graph):
        g = zoo_graph
        st = network_stats(g)
        assert st.avg_degree == pytest.approx(2 * g.edge_count / g.node_count)

    def test_clustering_against_dense_count(self):
        g = connected_gnp(60, 0.12, 1)
        a = np.zeros((g.node_count, g.node_count))
        for v in range(g.node_count):
            a[v, g.neighbors(v)] = 1.0
        tri = np.diag(a @ a @ a) / 2.0
        deg = a.sum(axis=1)
        wedge = deg * (deg - 1) / 2.0
        expect = np.where(wedge > 0, tri / np.maximum(wedge, 1), 0.0).mean()
        st = network_stats(g)
        assert st.avg_clustering == pytest.approx(expect, abs=1e-12)
