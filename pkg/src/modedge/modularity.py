"""Exact modularity evaluation and single-edge modularity deltas.

All quantities are exact: integer "scaled scores" internally, and
``fractions.Fraction`` at the API boundary. The scaled score of a partition
is ``4 * m**2 * Q``, which is always an integer for integer-weighted graphs
and is what every comparison in this package runs on.

Note on the singleton partition: placing every node in its own cluster gives
Q = -sum((d_i / 2m)^2), which is negative for any loop-free graph with an
edge. Claims elsewhere that this partition scores zero do not match the
pairwise formula; this module follows the formula.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .graph import Graph, Partition, apply_delta, EdgeDelta

__all__ = [
    "ModularityValue",
    "modularity",
    "modularity_pairwise",
    "modularity_matrix",
    "partition_score",
    "score_to_q",
    "delta_q_within",
    "delta_q_between",
    "delta_v_score",
]

# Exact rational modularity value. Fraction carries numerator, denominator
# and float(.) conversion, which is everything the reports need.
ModularityValue = Fraction


def _require_edges(g: Graph) -> None:
    if g.m <= 0:
        raise ValueError("modularity requires a graph with m > 0")


def _check_partition(g: Graph, p: Partition) -> None:
    if p.n != g.n:
        raise ValueError(f"partition covers {p.n} nodes, graph has {g.n}")


def cluster_totals(g: Graph, p: Partition) -> tuple[list[int], list[int]]:
    """Per-cluster (internal weight, volume). Volume is the degree sum."""
    intra = [0] * p.k
    vol = [0] * p.k
    for i, j, w in g.edges():
        if p.assign[i] == p.assign[j]:
            intra[p.assign[i]] += w
    for v in range(g.n):
        vol[p.assign[v]] += int(g.degrees[v])
    return intra, vol


def modularity(g: Graph, p: Partition) -> Fraction:
    """Cluster-sum form: sum over clusters of E_C/m - (vol_C / 2m)^2."""
    _require_edges(g)
    _check_partition(g, p)
    intra, vol = cluster_totals(g, p)
    m = g.m
    q = Fraction(0)
    for c in range(p.k):
        q += Fraction(intra[c], m) - Fraction(vol[c], 2 * m) ** 2
    return q


def partition_score(g: Graph, p: Partition) -> int:
    """Integer scaled modularity, 4 m^2 Q, from the pairwise form.

    Equals sum over ordered same-cluster pairs (diagonal included) of
    2 m A_ij - d_i d_j.
    """
    _require_edges(g)
    _check_partition(g, p)
    assign = np.asarray(p.assign)
    same = assign[:, None] == assign[None, :]
    b = 2 * g.m * g.adj - np.outer(g.degrees, g.degrees)
    return int(b[same].sum())


def score_to_q(score: int, m: int) -> Fraction:
    return Fraction(score, 4 * m * m)


def modularity_pairwise(g: Graph, p: Partition) -> Fraction:
    """Pairwise-sum form of modularity; equals ``modularity`` exactly."""
    return score_to_q(partition_score(g, p), g.m)


def modularity_matrix(g: Graph) -> list[list[Fraction]]:
    """Exact matrix with entries A_ij - d_i d_j / 2m."""
    _require_edges(g)
    two_m = 2 * g.m
    d = g.degrees
    return [
        [Fraction(int(g.adj[i, j])) - Fraction(int(d[i]) * int(d[j]), two_m) for j in range(g.n)]
        for i in range(g.n)
    ]


def _global_cluster_sum(g: Graph, p: Partition) -> int:
    """sum over clusters of (-8m^2 - 8m) * 2 E_C + (8m + 4) * vol_C^2.

    This is the term shared by both closed-form deltas: the sum over all
    ordered same-cluster pairs of (-8m^2-8m) A_xy + (8m+4) d_x d_y.
    """
    m = g.m
    intra, vol = cluster_totals(g, p)
    total = 0
    for c in range(p.k):
        total += (-8 * m * m - 8 * m) * (2 * intra[c]) + (8 * m + 4) * vol[c] * vol[c]
    return total


def delta_q_within(g: Graph, p: Partition, u: int, v: int) -> Fraction:
    """Exact modularity change from adding one unit of weight inside a cluster.

    Closed form; equals modularity(g + (u,v), p) - modularity(g, p).
    """
    _require_edges(g)
    _check_partition(g, p)
    if u == v:
        raise ValueError("u and v must differ")
    if p.assign[u] != p.assign[v]:
        raise ValueError("nodes are in different clusters; use delta_q_between")
    m = g.m
    _, vol = cluster_totals(g, p)
    vol_c = vol[p.assign[u]]
    num = 16 * m**3 - 16 * m * m * vol_c + _global_cluster_sum(g, p)
    return Fraction(num, (2 * m) ** 2 * (2 * m + 2) ** 2)


def delta_q_between(g: Graph, p: Partition, u: int, v: int) -> Fraction:
    """Exact modularity change from adding one unit of weight across clusters."""
    _require_edges(g)
    _check_partition(g, p)
    if u == v:
        raise ValueError("u and v must differ")
    if p.assign[u] == p.assign[v]:
        raise ValueError("nodes share a cluster; use delta_q_within")
    m = g.m
    _, vol = cluster_totals(g, p)
    vol_u = vol[p.assign[u]]
    vol_v = vol[p.assign[v]]
    num = -8 * m * m - 8 * m * m * vol_u - 8 * m * m * vol_v + _global_cluster_sum(g, p)
    return Fraction(num, (2 * m) ** 2 * (2 * m + 2) ** 2)


def delta_q_edge(g: Graph, p: Partition, u: int, v: int) -> Fraction:
    """Dispatch to the within/between closed form based on the partition."""
    if p.assign[u] == p.assign[v]:
        return delta_q_within(g, p, u, v)
    return delta_q_between(g, p, u, v)


def recompute_delta_q(g: Graph, p: Partition, u: int, v: int) -> Fraction:
    """Independent recomputation: modularity after minus before."""
    i, j = (u, v) if u < v else (v, u)
    g2 = apply_delta(g, EdgeDelta(((i, j, 1),)))
    return modularity(g2, p) - modularity(g, p)


def delta_v_score(g: Graph, t: Partition, u: int, v: int) -> int:
    """Greedy tie-in score for picking the second endpoint of an added edge.

    For a fixed first endpoint u, scores candidate v in u's cluster of t by
    the v-local share of the scaled modularity change, with the constant
    16 m^3 + 4 m^2 dropped. Smaller means v sits better inside the cluster.
    The cluster sum runs over y in the cluster with y != u, v. A_vv is zero
    here because loops are rejected at graph construction.
    """
    _check_partition(g, t)
    if u == v:
        raise ValueError("u and v must differ")
    if t.assign[v] != t.assign[u]:
        raise ValueError("v must lie in u's ground-truth cluster")
    m = g.m
    d = g.degrees
    dv = int(d[v])
    score = -16 * m * m * dv
    for y in range(g.n):
        if y == u or y == v or t.assign[y] != t.assign[u]:
            continue
        a_vy = int(g.adj[v, y])
        dy = int(d[y])
        score += 2 * ((-8 * m * m - 8 * m) * a_vy + (8 * m + 4) * dv * dy - 4 * m * m * dy)
    return score
