"""Bundled demo data and fixture constructions.

The karate club graph (34 nodes, 78 edges) ships with its two-faction
ground truth; the other datasets referenced in the literature are licensed
and must be supplied by the user through the parsers.
"""

from __future__ import annotations

from .graph import Graph, Partition, graph_from_edges
from .search import SearchConfig, maximize_modularity

__all__ = ["karate_graph", "karate_factions", "demo_fixture"]

_KARATE_EDGES = [
    (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (0, 7), (0, 8), (0, 10),
    (0, 11), (0, 12), (0, 13), (0, 17), (0, 19), (0, 21), (0, 31), (1, 2),
    (1, 3), (1, 7), (1, 13), (1, 17), (1, 19), (1, 21), (1, 30), (2, 3),
    (2, 7), (2, 8), (2, 9), (2, 13), (2, 27), (2, 28), (2, 32), (3, 7),
    (3, 12), (3, 13), (4, 6), (4, 10), (5, 6), (5, 10), (5, 16), (6, 16),
    (8, 30), (8, 32), (8, 33), (9, 33), (13, 33), (14, 32), (14, 33),
    (15, 32), (15, 33), (18, 32), (18, 33), (19, 33), (20, 32), (20, 33),
    (22, 32), (22, 33), (23, 25), (23, 27), (23, 29), (23, 32), (23, 33),
    (24, 25), (24, 27), (24, 31), (25, 31), (26, 29), (26, 33), (27, 33),
    (28, 31), (28, 33), (29, 32), (29, 33), (30, 32), (30, 33), (31, 32),
    (31, 33), (32, 33),
]

# 0 = instructor's faction, 1 = administrator's faction
_KARATE_FACTION = [
    0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 1, 0, 1, 0, 1,
    1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1,
]


def karate_graph() -> Graph:
    return graph_from_edges(34, [(i, j, 1) for i, j in _KARATE_EDGES])


def karate_factions() -> Partition:
    return Partition.from_assign(_KARATE_FACTION)


def karate_optimum(search: SearchConfig | None = None) -> Partition:
    """Best known modularity partition of the karate graph (4 communities).

    Computed by seeded Louvain restarts; with the defaults this lands on the
    canonical optimum with Q = 1277/3042 (about 0.4198).
    """
    cfg = search or SearchConfig(mode="heuristic", seed=0, heuristic_restarts=20)
    p, _, _ = maximize_modularity(karate_graph(), cfg)
    return p


def _complete_plus_two_paths() -> tuple[Graph, Partition]:
    """A 10-clique with two pendant 3-node paths, one hooked onto each of
    two distinct clique nodes. 16 nodes, 51 edges."""
    edges = [(i, j, 1) for i in range(10) for j in range(i + 1, 10)]
    edges += [(10, 11, 1), (11, 12, 1)]  # path one: 10-11-12
    edges += [(13, 14, 1), (14, 15, 1)]  # path two: 13-14-15
    edges += [(0, 10, 1), (1, 13, 1)]
    g = graph_from_edges(16, edges)
    p = Partition.from_assign([0] * 10 + [1, 1, 1] + [2, 2, 2])
    return g, p


def _karate_intra_only() -> tuple[Graph, Partition]:
    """Karate with every edge crossing the computed optimum deleted; the
    partition of interest is the connected components."""
    g = karate_graph()
    t = karate_optimum()
    adj = g.adj.copy()
    for i in range(g.n):
        for j in range(g.n):
            if t.assign[i] != t.assign[j]:
                adj[i, j] = 0
    return Graph(adj), t


def demo_fixture(name: str) -> tuple[Graph, Partition]:
    """Named demonstration instances.

    "figure1": karate restricted to intra-community edges, where adding a
    within-cluster edge can lower modularity. "figure2": clique plus two
    pendant paths, where adding a cross-cluster edge raises it. "karate":
    the full graph with its two-faction ground truth.
    """
    if name == "figure1":
        return _karate_intra_only()
    if name == "figure2":
        return _complete_plus_two_paths()
    if name == "karate":
        return karate_graph(), karate_factions()
    raise ValueError(f"unknown fixture {name!r} (use figure1, figure2 or karate)")
