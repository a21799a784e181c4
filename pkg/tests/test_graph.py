import itertools

import pytest

from graphca.errors import GraphError
from graphca.utils.graph import (
    automorphisms, ball, build_graph, cayley_graph, enumerate_graphs, graph_from_file, is_connected, moore_torus,
    reach, symmetrize, torus, words,
)


def _path3():
    return build_graph(
        ["v0", "v1", "v2"], ["a"], ["d"], {"v0": "a", "v1": "a", "v2": "a"},
        [("v0", "v1", "d"), ("v1", "v2", "d")],
    )


def _union_find_connected(graph) -> bool:
    parent = list(range(graph.n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for edges in graph.edges.values():
        for a, b in edges:
            parent[find(a)] = find(b)
    return len({find(i) for i in range(graph.n)}) <= 1


def test_single_vertex():
    g = build_graph(["v0"], ["a"], ["u"], {"v0": "a"}, [])
    assert g.n == 1
    assert g.edge_count() == 0


def test_duplicate_edge_rejected():
    with pytest.raises(GraphError) as excinfo:
        build_graph(["v0", "v1"], ["a"], ["d"], {"v0": "a", "v1": "a"}, [("v0", "v1", "d"), ("v0", "v1", "d")])
    assert excinfo.value.code == "duplicate_edge"
    assert excinfo.value.details["edge"] == ["v0", "v1", "d"]


def test_same_pair_under_two_labels_is_allowed():
    g = build_graph(["v0", "v1"], ["a"], ["d", "e"], {"v0": "a", "v1": "a"}, [("v0", "v1", "d"), ("v0", "v1", "e")])
    assert g.edge_count() == 2


@pytest.mark.parametrize("edges, labels, code", [
    ([("v0", "v9", "d")], {"v0": "a", "v1": "a"}, "unknown_vertex"),
    ([("v0", "v1", "x")], {"v0": "a", "v1": "a"}, "unknown_label"),
    ([], {"v0": "a", "v1": "z"}, "unknown_label"),
    ([], {"v0": "a"}, "unknown_label"),
])
def test_invalid_graphs(edges, labels, code):
    with pytest.raises(GraphError) as excinfo:
        build_graph(["v0", "v1"], ["a"], ["d"], labels, edges)
    assert excinfo.value.code == code


def test_duplicate_vertex():
    with pytest.raises(GraphError) as excinfo:
        build_graph(["v0", "v0"], ["a"], ["d"], {"v0": "a"}, [])
    assert excinfo.value.code == "duplicate_vertex"


def test_k3_undirected_has_six_directed_edges(k3):
    assert k3.edge_count() == 6
    assert is_connected(k3)


def test_reach_empty_word_is_start(k3):
    for v in range(k3.n):
        assert reach(k3, v, ()).indices() == [v]


def test_reach_along_path():
    g = _path3()
    assert reach(g, 0, ("d", "d")).indices() == [2]
    assert reach(g, 2, ("d",)).indices() == []


def test_reach_rejects_foreign_label():
    with pytest.raises(GraphError):
        reach(_path3(), 0, ("zz",))


def test_reach_respects_concatenation():
    for g in enumerate_graphs(2):
        for w1 in words(g.delta, 2):
            for w2 in words(g.delta, 1):
                for v in range(g.n):
                    expected = set()
                    for u in reach(g, v, w1):
                        expected |= set(reach(g, u, w2))
                    assert set(reach(g, v, w1 + w2)) == expected


def test_words_order():
    assert words(["a", "b"], 2) == [(), ("a",), ("b",), ("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")]


def test_ball_on_path():
    g = _path3()
    assert ball(g, 0, 0) == [0]
    assert ball(g, 0, 1) == [0, 1]
    assert ball(g, 0, 5) == [0, 1, 2]


def test_connectivity_basics(isolated2, k3):
    assert not is_connected(isolated2)
    assert is_connected(k3)
    assert is_connected(build_graph([], ["a"], ["u"], {}, []))


def test_connectivity_matches_union_find():
    for g in enumerate_graphs(3):
        assert is_connected(g) == _union_find_connected(g)


def test_cayley_z2():
    g = cayley_graph([[0, 1], [1, 0]], {"g": 1})
    assert g.n == 2
    assert g.edges["g"] == frozenset({(0, 1), (1, 0)})


@pytest.mark.parametrize("table, axiom", [
    ([[0, 0], [0, 0]], "identity"),
    ([[0, 2], [1, 0]], "closure"),
    ([[0, 2, 1], [1, 0, 2], [2, 1, 0]], "associativity"),
])
def test_cayley_rejects_non_groups(table, axiom):
    with pytest.raises(GraphError) as excinfo:
        cayley_graph(table, {"g": 0})
    assert excinfo.value.code == "not_a_group"
    assert excinfo.value.details["axiom"] == axiom


def test_torus_3x3_counts():
    g = torus((3, 3)).graph
    assert g.n == 9
    assert len(g.delta) == 4
    assert g.edge_count() == 36
    for d in g.delta:
        for v in range(g.n):
            assert len(g.successors(d, v)) == 1


@pytest.mark.parametrize("dims", [(3, 3), (5, 5)])
def test_cayley_reach_is_singleton(dims):
    g = torus(dims).graph
    for w in words(g.delta, 2):
        for v in range(g.n):
            assert len(reach(g, v, w)) == 1


def test_ball_offsets_and_wrapping():
    t = torus((5, 5))
    assert len(t.ball_offsets(1)) == 5
    assert t.ball_offsets(1)[0] == (0, 0)
    t.check_ball(2)
    with pytest.raises(GraphError) as excinfo:
        torus((4, 4)).check_ball(2)
    assert excinfo.value.code == "ball_wraps"


def test_moore_torus_has_eight_neighbours():
    g = moore_torus(3, 3)
    assert g.edge_count() == 72
    assert all(len(g.successors("u", v)) == 8 for v in range(g.n))


def test_enumerate_counts():
    assert len(list(enumerate_graphs(1))) == 2
    # 2 个单顶点图 + 2^{2·2} 个两顶点图
    assert len(list(enumerate_graphs(2))) == 18
    assert len(list(enumerate_graphs(3, symmetric=True))) == 1 + 2 + 8
    assert len(list(enumerate_graphs(1, sigma=["a", "b"]))) == 4


def test_enumerate_zero_gives_empty_graph():
    graphs = list(enumerate_graphs(0))
    assert len(graphs) == 1
    assert graphs[0].n == 0


def test_enumerate_up_to_isomorphism():
    assert len(list(enumerate_graphs(2, up_to_isomorphism=True))) == 2 + 10


def test_enumerate_is_deterministic():
    first = [g.to_json() for g in enumerate_graphs(2)]
    second = [g.to_json() for g in enumerate_graphs(2)]
    assert first == second


def test_enumerate_bound():
    with pytest.raises(GraphError) as excinfo:
        list(enumerate_graphs(5))
    assert excinfo.value.code == "bound_exceeded"


def test_symmetrize_and_automorphisms(c4):
    directed = build_graph(
        ["v0", "v1", "v2", "v3"], ["a"], ["u"], {f"v{i}": "a" for i in range(4)},
        [(f"v{i}", f"v{(i + 1) % 4}", "u") for i in range(4)],
    )
    assert len(automorphisms(directed)) == 4
    assert symmetrize(directed) == c4
    assert len(automorphisms(c4)) == 8


def test_graph_file_roundtrip(k3):
    assert graph_from_file(k3.to_file()) == k3
    assert k3.to_json()["edges"][0] == {"from": "v0", "to": "v1", "label": "u"}


def test_vertex_sets(k3):
    vs = k3.vertex_set(["v0", "v2"])
    assert 0 in vs and 2 in vs and 1 not in vs
    assert len(vs) == 2
    assert k3.ids(vs) == ["v0", "v2"]
    with pytest.raises(GraphError):
        k3.index("nope")


def test_permutation_count_of_k3(k3):
    assert len(automorphisms(k3)) == len(list(itertools.permutations(range(3))))
