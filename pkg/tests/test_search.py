from fractions import Fraction

import pytest

from modedge import (
    ExactLimitError,
    Partition,
    SearchConfig,
    enumerate_partitions,
    graph_from_edges,
    is_optimal,
    louvain_partition,
    maximize_modularity,
    modularity,
)
from modedge.datasets import karate_graph
from modedge.modularity import partition_score

from conftest import (
    oracle_best_score,
    oracle_partitions,
    oracle_score,
    random_graph,
    random_graph_min_degree1,
)

BELL = {1: 1, 2: 2, 3: 5, 4: 15, 5: 52, 6: 203, 7: 877, 8: 4140, 10: 115975}


def two_triangles():
    return graph_from_edges(
        6, [(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1)]
    )


@pytest.mark.parametrize("n", [1, 3, 5, 8, 10])
def test_enumeration_counts(n):
    assert sum(1 for _ in enumerate_partitions(n)) == BELL[n]


def test_enumeration_matches_oracle_order():
    got = [list(p.assign) for p in enumerate_partitions(5)]
    want = list(oracle_partitions(5))
    assert got == want  # same set, same restricted-growth order


def test_enumeration_yields_canonical_unique():
    seen = set()
    for p in enumerate_partitions(6):
        assert p == Partition.from_assign(p.assign)
        assert p.assign not in seen
        seen.add(p.assign)


def test_enumeration_limit():
    with pytest.raises(ExactLimitError):
        next(enumerate_partitions(15))


def test_triangle_single_cluster():
    g = graph_from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
    p, q, exact = maximize_modularity(g, SearchConfig(mode="exact"))
    assert exact and q == 0 and p.k == 1


def test_two_triangles_exact():
    g = two_triangles()
    p, q, exact = maximize_modularity(g, SearchConfig(mode="exact"))
    assert q == Fraction(1, 2)
    assert p.assign == (0, 0, 0, 1, 1, 1)


def test_exact_matches_oracle(rnd):
    for _ in range(40):
        g = random_graph(rnd, rnd.randint(2, 7), wmax=2)
        if g is None:
            continue
        _, q, _ = maximize_modularity(g, SearchConfig(mode="exact"))
        assert q == Fraction(oracle_best_score(g), 4 * g.m * g.m)


def test_exact_tie_break_lexicographic(rnd):
    for _ in range(25):
        g = random_graph(rnd, rnd.randint(2, 6))
        if g is None:
            continue
        p, q, _ = maximize_modularity(g, SearchConfig(mode="exact"))
        best = max(oracle_score(g, a) for a in oracle_partitions(g.n))
        winners = [tuple(a) for a in oracle_partitions(g.n) if oracle_score(g, a) == best]
        assert p.assign == min(winners)


def test_exact_over_limit_rejected():
    g = karate_graph()
    with pytest.raises(ExactLimitError):
        maximize_modularity(g, SearchConfig(mode="exact"))


def test_louvain_two_triangles_any_seed():
    g = two_triangles()
    for seed in range(6):
        assert louvain_partition(g, seed).assign == (0, 0, 0, 1, 1, 1)


def test_louvain_karate():
    g = karate_graph()
    p, q, exact = maximize_modularity(
        g, SearchConfig(mode="heuristic", seed=0, heuristic_restarts=20)
    )
    assert not exact
    assert float(q) >= 0.41
    assert p.k == 4


def test_louvain_isolated_nodes_alone():
    g = graph_from_edges(4, [(0, 1, 1)])
    p = louvain_partition(g, seed=1)
    assert p.assign[0] == p.assign[1]
    assert p.assign[2] != p.assign[0] and p.assign[3] != p.assign[0]
    assert p.assign[2] != p.assign[3]
    assert modularity(g, p) == 0


def test_louvain_never_beats_exact(rnd):
    for _ in range(25):
        g = random_graph(rnd, rnd.randint(3, 8), wmax=2)
        if g is None:
            continue
        _, q_exact, _ = maximize_modularity(g, SearchConfig(mode="exact"))
        p = louvain_partition(g, seed=rnd.randint(0, 99))
        assert modularity(g, p) <= q_exact


def test_louvain_deterministic(rnd):
    for _ in range(10):
        g = random_graph(rnd, rnd.randint(4, 9))
        if g is None:
            continue
        seed = rnd.randint(0, 10)
        assert louvain_partition(g, seed) == louvain_partition(g, seed)


def test_is_optimal_two_triangles():
    g = two_triangles()
    comp = Partition.from_assign([0, 0, 0, 1, 1, 1])
    ok, witness = is_optimal(g, comp, SearchConfig(mode="exact"))
    assert ok and witness is None
    ok, witness = is_optimal(g, Partition.from_assign([0] * 6), SearchConfig(mode="exact"))
    assert not ok
    assert witness == comp


def test_is_optimal_self_consistent(rnd):
    for _ in range(20):
        g = random_graph(rnd, rnd.randint(3, 7))
        if g is None:
            continue
        p, _, _ = maximize_modularity(g, SearchConfig(mode="exact"))
        ok, _ = is_optimal(g, p, SearchConfig(mode="exact"))
        assert ok


def _components_of_cluster(g, nodes):
    nodes = set(nodes)
    comps = []
    while nodes:
        start = nodes.pop()
        comp = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in g.neighbors(u):
                if v in nodes:
                    nodes.remove(v)
                    comp.add(v)
                    stack.append(v)
        comps.append(comp)
    return comps


def test_optimum_has_connected_clusters(rnd):
    # holds for every optimum when no node is isolated
    for _ in range(30):
        g = random_graph_min_degree1(rnd, rnd.randint(3, 8))
        p, _, _ = maximize_modularity(g, SearchConfig(mode="exact"))
        for cluster in p.clusters():
            assert len(_components_of_cluster(g, cluster)) == 1


def test_optimum_has_no_degree1_singleton(rnd):
    for _ in range(30):
        g = random_graph_min_degree1(rnd, rnd.randint(3, 8))
        p, _, _ = maximize_modularity(g, SearchConfig(mode="exact"))
        for cluster in p.clusters():
            if len(cluster) == 1:
                assert int(g.degrees[cluster[0]]) != 1


def test_search_determinism(rnd):
    for _ in range(10):
        g = random_graph(rnd, rnd.randint(3, 8))
        if g is None:
            continue
        cfg = SearchConfig(mode="auto", seed=3, heuristic_restarts=5)
        assert maximize_modularity(g, cfg) == maximize_modularity(g, cfg)
