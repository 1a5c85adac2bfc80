"""Shared test helpers.

The oracle functions here are intentionally independent of the package:
plain-Python set-partition enumeration and modularity scoring, used to
cross-check the package's vectorized implementations.
"""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from modedge import Graph, Partition, graph_from_edges


def oracle_partitions(n: int):
    """All set partitions of range(n) as assignment lists, recursive RGS."""

    def rec(prefix, mx):
        if len(prefix) == n:
            yield list(prefix)
            return
        for label in range(mx + 2):
            prefix.append(label)
            yield from rec(prefix, max(mx, label))
            prefix.pop()

    yield from rec([0], 0) if n else iter(())


def oracle_score(g: Graph, assign) -> int:
    """4 m^2 Q via plain loops over ordered same-cluster pairs."""
    m = g.m
    deg = [int(x) for x in g.degrees]
    s = 0
    for i in range(g.n):
        for j in range(g.n):
            if assign[i] == assign[j]:
                s += 2 * m * int(g.adj[i, j]) - deg[i] * deg[j]
    return s


def oracle_q(g: Graph, assign) -> Fraction:
    return Fraction(oracle_score(g, assign), 4 * g.m * g.m)


def oracle_best_score(g: Graph) -> int:
    return max(oracle_score(g, a) for a in oracle_partitions(g.n))


def random_graph(rnd: random.Random, n: int, p: float = 0.5, wmax: int = 1) -> Graph | None:
    """Random weighted graph; None when no edge was drawn."""
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rnd.random() < p:
                edges.append((i, j, rnd.randint(1, wmax)))
    if not edges:
        return None
    return graph_from_edges(n, edges)


def random_graph_min_degree1(rnd: random.Random, n: int, p: float = 0.5) -> Graph:
    """Random graph where every node has degree at least one."""
    while True:
        edges = set()
        for i in range(n):
            for j in range(i + 1, n):
                if rnd.random() < p:
                    edges.add((i, j))
        isolated = [v for v in range(n) if not any(v in e for e in edges)]
        for v in isolated:
            u = rnd.choice([x for x in range(n) if x != v])
            edges.add((min(u, v), max(u, v)))
        if edges:
            return graph_from_edges(n, [(i, j, 1) for i, j in sorted(edges)])


def random_partition(rnd: random.Random, n: int, kmax: int = 3) -> Partition:
    return Partition.from_assign([rnd.randint(0, kmax - 1) for _ in range(n)])


@pytest.fixture
def rnd():
    return random.Random(0xC0FFEE)
