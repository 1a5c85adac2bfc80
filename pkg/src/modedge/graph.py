"""Core graph and partition values.

Graphs are undirected with nonnegative integer edge weights (a weight of k
reads as k parallel unit edges). Self-loops are rejected at construction.
Both ``Graph`` and ``Partition`` are immutable; edits go through
``EdgeDelta`` values and ``apply_delta``, which return fresh graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Graph",
    "Partition",
    "EdgeDelta",
    "graph_from_edges",
    "apply_delta",
    "canonicalize",
    "distance2_pairs",
]


class GraphError(ValueError):
    """Raised for structurally invalid graphs, deltas or partitions."""


class Graph:
    """Symmetric nonnegative-integer weighted adjacency over nodes 0..n-1.

    ``m`` is the total edge weight, ``degrees[i]`` the weighted degree.
    Instances are immutable; the adjacency array is marked read-only.
    """

    __slots__ = ("n", "adj", "degrees", "m")

    def __init__(self, adj: np.ndarray):
        adj = np.asarray(adj, dtype=np.int64)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise GraphError(f"adjacency must be square, got shape {adj.shape}")
        if (adj < 0).any():
            raise GraphError("negative edge weight")
        if (np.diagonal(adj) != 0).any():
            raise GraphError("self-loops are not allowed")
        if (adj != adj.T).any():
            raise GraphError("adjacency must be symmetric")
        adj = adj.copy()
        adj.setflags(write=False)
        self.n = int(adj.shape[0])
        self.adj = adj
        degrees = adj.sum(axis=1)
        degrees.setflags(write=False)
        self.degrees = degrees
        self.m = int(degrees.sum()) // 2

    def __setattr__(self, name, value):
        if hasattr(self, "m"):  # m is assigned last in __init__
            raise AttributeError("Graph is immutable")
        super().__setattr__(name, value)

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and bool(
            (self.adj == other.adj).all()
        )

    def __hash__(self):
        return hash((self.n, self.adj.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def weight(self, i: int, j: int) -> int:
        return int(self.adj[i, j])

    def edges(self) -> list[tuple[int, int, int]]:
        """All (i, j, weight) with i < j and weight > 0, lexicographic."""
        ii, jj = np.nonzero(np.triu(self.adj, k=1))
        return [(int(i), int(j), int(self.adj[i, j])) for i, j in zip(ii, jj)]

    def neighbors(self, i: int) -> list[int]:
        return [int(j) for j in np.nonzero(self.adj[i])[0]]


@dataclass(frozen=True)
class Partition:
    """Canonical node-to-cluster assignment.

    ``assign[v]`` is the cluster id of node v. Ids run 0..k-1 with no gaps
    and are ordered by first appearance, so two partitions are equal iff
    their ``assign`` tuples are equal.
    """

    assign: tuple[int, ...]
    k: int

    @staticmethod
    def from_assign(assign: Sequence[int]) -> "Partition":
        """Build a canonical partition from an arbitrary labelling."""
        relabel: dict[int, int] = {}
        out = []
        for a in assign:
            if a not in relabel:
                relabel[a] = len(relabel)
            out.append(relabel[a])
        return Partition(tuple(out), len(relabel))

    @property
    def n(self) -> int:
        return len(self.assign)

    def clusters(self) -> list[list[int]]:
        """Node lists per cluster id."""
        out: list[list[int]] = [[] for _ in range(self.k)]
        for v, a in enumerate(self.assign):
            out[a].append(v)
        return out

    def cluster_of(self, v: int) -> int:
        return self.assign[v]


@dataclass(frozen=True)
class EdgeDelta:
    """A reversible batch of weight changes: (i, j, dw) with i < j, dw != 0."""

    pairs: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        for i, j, dw in self.pairs:
            if i >= j:
                raise GraphError(f"delta pair must have i < j, got ({i}, {j})")
            if dw == 0:
                raise GraphError(f"zero delta on pair ({i}, {j})")

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[int, int, int]]) -> "EdgeDelta":
        """Normalize orientation and merge duplicate pairs; drop zero sums."""
        acc: dict[tuple[int, int], int] = {}
        for i, j, dw in pairs:
            if i > j:
                i, j = j, i
            acc[(i, j)] = acc.get((i, j), 0) + dw
        merged = tuple((i, j, dw) for (i, j), dw in sorted(acc.items()) if dw != 0)
        return EdgeDelta(merged)

    def negated(self) -> "EdgeDelta":
        return EdgeDelta(tuple((i, j, -dw) for i, j, dw in self.pairs))

    def total_weight(self) -> int:
        return sum(dw for _, _, dw in self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


def graph_from_edges(n: int, edges: Iterable[tuple[int, int, int]]) -> Graph:
    """Build a graph from (i, j, weight) triples; duplicates accumulate."""
    adj = np.zeros((n, n), dtype=np.int64)
    for i, j, w in edges:
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"node out of range in edge ({i}, {j})")
        if i == j:
            raise GraphError(f"loop edge ({i}, {i}) rejected")
        if w < 1:
            raise GraphError(f"edge ({i}, {j}) has weight {w} < 1")
        adj[i, j] += w
        adj[j, i] += w
    return Graph(adj)


def apply_delta(g: Graph, delta: EdgeDelta) -> Graph:
    """Return a new graph with the delta applied; rejects negative weights."""
    adj = g.adj.copy()
    for i, j, dw in delta.pairs:
        if not (0 <= i < g.n and 0 <= j < g.n):
            raise GraphError(f"delta pair ({i}, {j}) out of range")
        if adj[i, j] + dw < 0:
            raise GraphError(
                f"delta drives weight of ({i}, {j}) to {int(adj[i, j]) + dw} < 0"
            )
        adj[i, j] += dw
        adj[j, i] += dw
    return Graph(adj)


def canonicalize(p: Partition | Sequence[int]) -> Partition:
    """Relabel cluster ids by first appearance. Idempotent."""
    assign = p.assign if isinstance(p, Partition) else p
    return Partition.from_assign(assign)


def distance2_pairs(g: Graph) -> list[tuple[int, int]]:
    """Non-adjacent node pairs joined by a 2-step path, lexicographic."""
    present = g.adj > 0
    two_step = present @ present
    cand = two_step & ~present
    ii, jj = np.nonzero(np.triu(cand, k=1))
    return [(int(i), int(j)) for i, j in zip(ii, jj)]
