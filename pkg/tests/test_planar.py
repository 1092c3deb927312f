import pytest

from treetype.planar import (
    GraphError,
    RotationGraph,
    build_graph,
    bfs_distances,
    dual_graph,
    euler_characteristic,
    graphs_equal_up_to_rotation,
    trace_faces,
    twin,
    word_distance,
)

from oracle import all_pairs_shortest


def single_edge():
    return build_graph(2, [[1], [0]])


def four_cycle():
    return build_graph(4, [[1, 3], [2, 0], [3, 1], [0, 2]])


def theta_graph():
    return build_graph(2, [[1, 1, 1], [0, 0, 0]])


def path_graph(n):
    lists = [[1]] + [[i - 1, i + 1] for i in range(1, n - 1)] + [[n - 2]]
    return build_graph(n, lists)


def test_build_single_edge():
    g = single_edge()
    assert g.vertex_count == 2
    assert g.dart_count == 2
    assert g.edges() == [(0, 1)]


def test_build_four_cycle():
    g = four_cycle()
    assert g.dart_count == 8
    assert all(g.degree(v) == 2 for v in range(4))


def test_degree_sum_is_dart_count():
    for g in (single_edge(), four_cycle(), theta_graph(), path_graph(7)):
        assert sum(g.degree(v) for v in range(g.vertex_count)) == g.dart_count
        assert g.dart_count == 2 * g.edge_count


def test_build_rejects_inconsistent_adjacency():
    with pytest.raises(GraphError, match="0 and 1"):
        build_graph(2, [[1, 1], [0]])


def test_build_rejects_self_loop():
    with pytest.raises(GraphError, match="self-loop"):
        build_graph(2, [[0, 1], [0]])


def test_build_rejects_disconnected():
    with pytest.raises(GraphError, match="not connected"):
        build_graph(4, [[1], [0], [3], [2]])


def test_faces_single_edge():
    g = single_edge()
    fs = trace_faces(g)
    assert fs.face_count == 1
    assert fs.dart_counts() == [2]
    assert euler_characteristic(g, fs) == 2


def test_faces_four_cycle():
    fs = trace_faces(four_cycle())
    assert fs.face_count == 2
    assert fs.dart_counts() == [4, 4]


def test_faces_theta_graph():
    # hand face-trace: three faces of two darts each
    g = theta_graph()
    fs = trace_faces(g)
    assert fs.face_count == 3
    assert sorted(fs.dart_counts()) == [2, 2, 2]
    assert euler_characteristic(g, fs) == 2


def test_faces_partition_darts():
    for g in (single_edge(), four_cycle(), theta_graph(), path_graph(5)):
        fs = trace_faces(g)
        seen = sorted(d for f in fs.faces for d in f)
        assert seen == list(range(g.dart_count))
        for f_idx, f in enumerate(fs.faces):
            for d in f:
                assert fs.dart_face[d] == f_idx


def test_frontier_flagging():
    g = build_graph(3, [[1], [0, 2], [1]], flags={2: {"frontier": "1"}})
    fs = trace_faces(g)
    assert fs.touches_frontier == [True]


def test_word_distance_identity_and_path():
    g = path_graph(8)
    assert word_distance(g, 3, 3) == 0
    assert word_distance(g, 0, 7) == 7
    assert word_distance(g, 7, 0) == 7


def test_word_distance_unknown_vertex():
    with pytest.raises(GraphError, match="unknown vertex"):
        word_distance(path_graph(3), 0, 9)


def test_word_distance_matches_bruteforce():
    gs = [four_cycle(), theta_graph(), path_graph(9)]
    # a small grid via neighbor lists, ccw rotations
    rows, cols = 4, 5
    lists = []
    for r in range(rows):
        for c in range(cols):
            nb = []
            if c + 1 < cols:
                nb.append(r * cols + c + 1)
            if r + 1 < rows:
                nb.append((r + 1) * cols + c)
            if c > 0:
                nb.append(r * cols + c - 1)
            if r > 0:
                nb.append((r - 1) * cols + c)
            lists.append(nb)
    gs.append(build_graph(rows * cols, lists))
    for g in gs:
        table = all_pairs_shortest(g.neighbor_lists())
        for u in range(g.vertex_count):
            for v in range(g.vertex_count):
                assert word_distance(g, u, v) == table[u][v]


def test_bfs_distances_multi_source():
    g = path_graph(6)
    d = bfs_distances(g, [0, 5])
    assert d == [0, 1, 2, 2, 1, 0]


def test_dual_theta_is_triangle():
    g = theta_graph()
    fs = trace_faces(g)
    d = dual_graph(g, fs)
    assert d.vertex_count == 3
    assert d.edge_count == 3
    assert sorted(d.degree(v) for v in range(3)) == [2, 2, 2]
    dfs = trace_faces(d)
    assert dfs.face_count == 2  # one per primal vertex


def test_dual_four_cycle():
    g = four_cycle()
    d = dual_graph(g, trace_faces(g))
    assert d.vertex_count == 2
    assert d.edge_count == 4
    assert d.degree(0) == 4 and d.degree(1) == 4


def test_dual_of_dual_faces_match_primal_vertices():
    triangle = build_graph(3, [[1, 2], [2, 0], [0, 1]])
    for g in (theta_graph(), four_cycle(), triangle):
        fs = trace_faces(g)
        d = dual_graph(g, fs)
        dfs = trace_faces(d)
        assert dfs.face_count == g.vertex_count
        assert euler_characteristic(d, dfs) == 2


def test_equal_up_to_rotation():
    a = four_cycle()
    b = build_graph(4, [[3, 1], [0, 2], [1, 3], [2, 0]])
    assert graphs_equal_up_to_rotation(a, b)
    c = path_graph(4)
    assert not graphs_equal_up_to_rotation(a, c)


def test_twin_involution():
    g = theta_graph()
    for d in range(g.dart_count):
        assert twin(twin(d)) == d
        assert twin(d) != d
