import numpy as np
import pytest

from modedge import (
    EdgeDelta,
    Graph,
    GraphError,
    Partition,
    apply_delta,
    canonicalize,
    distance2_pairs,
    graph_from_edges,
)

from conftest import random_graph


def test_path_construction():
    g = graph_from_edges(3, [(0, 1, 1), (1, 2, 1)])
    assert g.m == 2
    assert list(g.degrees) == [1, 2, 1]


def test_multi_edge_accumulates():
    g = graph_from_edges(2, [(0, 1, 1), (0, 1, 1)])
    assert g.adj[0, 1] == 2
    assert g.m == 2


def test_loop_rejected():
    with pytest.raises(GraphError):
        graph_from_edges(2, [(0, 0, 1)])


def test_out_of_range_rejected():
    with pytest.raises(GraphError):
        graph_from_edges(2, [(0, 2, 1)])


def test_zero_weight_rejected():
    with pytest.raises(GraphError):
        graph_from_edges(2, [(0, 1, 0)])


def test_apply_delta_path_to_triangle_and_back():
    path = graph_from_edges(3, [(0, 1, 1), (1, 2, 1)])
    tri = apply_delta(path, EdgeDelta(((0, 2, 1),)))
    assert tri.m == 3
    back = apply_delta(tri, EdgeDelta(((0, 2, -1),)))
    assert back == path


def test_apply_delta_underflow_rejected():
    path = graph_from_edges(3, [(0, 1, 1), (1, 2, 1)])
    with pytest.raises(GraphError):
        apply_delta(path, EdgeDelta(((0, 1, -2),)))


def test_apply_delta_value_semantics():
    g = graph_from_edges(3, [(0, 1, 1)])
    g2 = apply_delta(g, EdgeDelta(((1, 2, 1),)))
    assert g.m == 1 and g2.m == 2
    with pytest.raises(ValueError):
        g.adj[0, 2] = 5  # read-only array


def test_graph_immutable():
    g = graph_from_edges(2, [(0, 1, 1)])
    with pytest.raises(AttributeError):
        g.m = 7


def test_delta_roundtrip_random(rnd):
    for _ in range(50):
        g = random_graph(rnd, rnd.randint(3, 8), wmax=3)
        if g is None:
            continue
        pairs = []
        for i in range(g.n):
            for j in range(i + 1, g.n):
                if rnd.random() < 0.3:
                    dw = rnd.randint(-int(g.adj[i, j]), 2)
                    if dw:
                        pairs.append((i, j, dw))
        if not pairs:
            continue
        d = EdgeDelta.from_pairs(pairs)
        assert apply_delta(apply_delta(g, d), d.negated()) == g


def test_degree_sum_is_twice_m(rnd):
    for _ in range(30):
        g = random_graph(rnd, rnd.randint(2, 9), wmax=4)
        if g is None:
            continue
        assert int(g.degrees.sum()) == 2 * g.m


def test_canonicalize_examples():
    assert canonicalize([1, 1, 0, 0]).assign == (0, 0, 1, 1)
    assert canonicalize([0, 0, 1, 1]).assign == (0, 0, 1, 1)
    assert canonicalize([2, 0, 2, 1]).assign == (0, 1, 0, 2)


def test_canonicalize_idempotent_and_label_invariant(rnd):
    for _ in range(100):
        n = rnd.randint(1, 9)
        assign = [rnd.randint(0, 4) for _ in range(n)]
        p = canonicalize(assign)
        assert canonicalize(p) == p
        # relabel by a random permutation of the cluster ids
        perm = list(range(5))
        rnd.shuffle(perm)
        assert canonicalize([perm[a] for a in assign]) == p


def test_partition_requires_every_label():
    p = Partition.from_assign([3, 3, 9])
    assert p.assign == (0, 0, 1)
    assert p.k == 2
    assert p.clusters() == [[0, 1], [2]]


def test_distance2_path():
    g = graph_from_edges(3, [(0, 1, 1), (1, 2, 1)])
    assert distance2_pairs(g) == [(0, 2)]


def test_distance2_triangle_empty():
    g = graph_from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
    assert distance2_pairs(g) == []


def test_distance2_star():
    g = graph_from_edges(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)])
    assert distance2_pairs(g) == [(1, 2), (1, 3), (2, 3)]


def test_distance2_matches_brute_force(rnd):
    for _ in range(40):
        g = random_graph(rnd, rnd.randint(3, 9))
        if g is None:
            continue
        want = []
        for i in range(g.n):
            for j in range(i + 1, g.n):
                if g.adj[i, j] == 0 and any(
                    g.adj[i, k] and g.adj[j, k] for k in range(g.n)
                ):
                    want.append((i, j))
        assert distance2_pairs(g) == want
