"""Modularity-maximizing partition search.

Two backends: exact enumeration of all set partitions (restricted-growth
order, vectorized in blocks, integer scores) for small n, and seeded
Louvain-style local moving with aggregation for everything else. The exact
backend is the optimality oracle the row-generation loop relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .graph import Graph, Partition
from .modularity import Fraction, partition_score, score_to_q

__all__ = [
    "SearchConfig",
    "SearchResult",
    "ExactLimitError",
    "MAX_EXACT_N",
    "enumerate_partitions",
    "maximize_modularity",
    "louvain_partition",
    "is_optimal",
]

# Bell(14) is about 1.9e8; anything beyond is not enumerable at desk scale.
MAX_EXACT_N = 14

_BLOCK_ROWS = 400_000


class ExactLimitError(ValueError):
    """Exact enumeration requested beyond the node limit; use the heuristic."""


@dataclass(frozen=True)
class SearchConfig:
    mode: str = "auto"  # "exact" | "heuristic" | "auto"
    exact_n_limit: int = 12
    seed: int = 0
    heuristic_restarts: int = 20

    def __post_init__(self):
        if self.mode not in ("exact", "heuristic", "auto"):
            raise ValueError(f"unknown search mode {self.mode!r}")
        if self.exact_n_limit > MAX_EXACT_N:
            raise ValueError(f"exact_n_limit must be <= {MAX_EXACT_N}")

    def resolve_mode(self, n: int) -> str:
        if self.mode == "auto":
            return "exact" if n <= self.exact_n_limit else "heuristic"
        return self.mode


@dataclass(frozen=True)
class SearchResult:
    partition: Partition
    q: Fraction
    exact: bool


def _rgs_blocks(n: int, block: int = _BLOCK_ROWS) -> Iterator[np.ndarray]:
    """All restricted-growth strings of length n as int8 blocks, lex order."""

    def expand(arr: np.ndarray, mx: np.ndarray) -> Iterator[np.ndarray]:
        t = arr.shape[1]
        if t == n:
            yield arr
            return
        counts = mx.astype(np.int64) + 2
        if counts.sum() > block and arr.shape[0] > 1:
            half = arr.shape[0] // 2
            yield from expand(arr[:half], mx[:half])
            yield from expand(arr[half:], mx[half:])
            return
        total = int(counts.sum())
        idx = np.repeat(np.arange(arr.shape[0]), counts)
        starts = np.cumsum(counts) - counts
        labels = (np.arange(total) - starts[idx]).astype(np.int8)
        new = np.empty((total, t + 1), dtype=np.int8)
        new[:, :t] = arr[idx]
        new[:, t] = labels
        yield from expand(new, np.maximum(mx[idx], labels))

    yield from expand(np.zeros((1, 1), dtype=np.int8), np.zeros(1, dtype=np.int8))


def enumerate_partitions(n: int) -> Iterator[Partition]:
    """Every set partition of {0..n-1} once, canonical, restricted-growth order."""
    if n < 1:
        raise ValueError("need at least one node")
    if n > MAX_EXACT_N:
        raise ExactLimitError(f"n={n} exceeds the enumeration ceiling {MAX_EXACT_N}")
    for blockarr in _rgs_blocks(n):
        for row in blockarr:
            assign = tuple(int(a) for a in row)
            yield Partition(assign, max(assign) + 1)


def exact_best(
    g: Graph, exclude: Optional[Partition] = None
) -> tuple[int, Partition]:
    """Best integer score and lexicographically-smallest argmax partition.

    With ``exclude`` set, that one partition is skipped (used by the
    strict-optimality variant of the row-generation loop).
    """
    if g.m <= 0:
        raise ValueError("m > 0 required")
    n = g.n
    b = 2 * g.m * g.adj - np.outer(g.degrees, g.degrees)
    trace = int(np.trace(b))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    excl_row = np.asarray(exclude.assign, dtype=np.int8) if exclude is not None else None

    best_score: Optional[int] = None
    best_assign: Optional[tuple[int, ...]] = None
    for blockarr in _rgs_blocks(n):
        scores = np.full(blockarr.shape[0], trace, dtype=np.int64)
        for i, j in pairs:
            w = int(b[i, j])
            if w:
                scores += (2 * w) * (blockarr[:, i] == blockarr[:, j])
        if excl_row is not None:
            hit = np.nonzero((blockarr == excl_row).all(axis=1))[0]
            if hit.size:
                scores[hit[0]] = np.iinfo(np.int64).min
        k = int(np.argmax(scores))  # first occurrence keeps lex order
        s = int(scores[k])
        if best_score is None or s > best_score:
            best_score = s
            best_assign = tuple(int(a) for a in blockarr[k])
    assert best_score is not None and best_assign is not None
    return best_score, Partition(best_assign, max(best_assign) + 1)


def _aggregate(
    adj: list[dict[int, int]], self_w: list[int], comm: list[int]
) -> tuple[list[dict[int, int]], list[int], list[int]]:
    """Collapse communities into super-nodes. Returns (adj, self_w, relabel)."""
    ids = sorted(set(comm))
    relabel = {c: i for i, c in enumerate(ids)}
    k = len(ids)
    new_adj: list[dict[int, int]] = [dict() for _ in range(k)]
    new_self = [0] * k
    for v, nbrs in enumerate(adj):
        cv = relabel[comm[v]]
        new_self[cv] += self_w[v]
        for u, w in nbrs.items():
            if u < v:
                continue
            cu = relabel[comm[u]]
            if cu == cv:
                new_self[cv] += w
            else:
                new_adj[cv][cu] = new_adj[cv].get(cu, 0) + w
                new_adj[cu][cv] = new_adj[cu].get(cv, 0) + w
    return new_adj, new_self, [relabel[c] for c in comm]


def louvain_partition(g: Graph, seed: int = 0) -> Partition:
    """Local moving plus aggregation until no move improves modularity.

    Node visit order is shuffled per phase by a PCG64 stream, so the result
    is a deterministic function of (g, seed). Moves only happen on a strict
    integer-score gain, which guarantees termination. Isolated nodes never
    gain and end up in singleton clusters.
    """
    if g.m <= 0:
        raise ValueError("m > 0 required")
    rng = np.random.Generator(np.random.PCG64(seed))
    m = g.m

    adj: list[dict[int, int]] = [
        {int(j): int(g.adj[i, j]) for j in np.nonzero(g.adj[i])[0]} for i in range(g.n)
    ]
    self_w = [0] * g.n
    membership = list(range(g.n))  # original node -> current super-node

    while True:
        nnodes = len(adj)
        vol = [2 * self_w[v] + sum(adj[v].values()) for v in range(nnodes)]
        comm = list(range(nnodes))
        comm_vol = vol[:]

        moved_any = False
        improving = True
        while improving:
            improving = False
            order = np.arange(nnodes)
            rng.shuffle(order)
            for v in (int(x) for x in order):
                c0 = comm[v]
                comm_vol[c0] -= vol[v]
                links: dict[int, int] = {c0: 0}
                for u, w in adj[v].items():
                    cu = comm[u]
                    links[cu] = links.get(cu, 0) + w
                # scaled gain of joining c: 2 m k_{v,c} - vol_v * vol_c
                best_c, best_gain = c0, 2 * m * links[c0] - vol[v] * comm_vol[c0]
                for c in sorted(links):
                    gain = 2 * m * links[c] - vol[v] * comm_vol[c]
                    if gain > best_gain:
                        best_c, best_gain = c, gain
                comm[v] = best_c
                comm_vol[best_c] += vol[v]
                if best_c != c0:
                    improving = True
                    moved_any = True

        if not moved_any:
            break
        adj, self_w, node_map = _aggregate(adj, self_w, comm)
        membership = [node_map[membership[orig]] for orig in range(g.n)]

    return Partition.from_assign(membership)


def _heuristic_best(g: Graph, cfg: SearchConfig) -> tuple[int, Partition]:
    best_score: Optional[int] = None
    best: Optional[Partition] = None
    for r in range(max(1, cfg.heuristic_restarts)):
        p = louvain_partition(g, seed=cfg.seed + r)
        s = partition_score(g, p)
        if best_score is None or s > best_score or (s == best_score and p.assign < best.assign):
            best_score, best = s, p
    assert best_score is not None and best is not None
    return best_score, best


def maximize_modularity(
    g: Graph, cfg: SearchConfig = SearchConfig()
) -> tuple[Partition, Fraction, bool]:
    """Best partition found, its exact modularity, and an exactness flag.

    Exact mode returns the true argmax with the lexicographically smallest
    canonical assignment among ties; heuristic mode returns best-of-restarts.
    """
    if g.m <= 0:
        raise ValueError("m > 0 required")
    mode = cfg.resolve_mode(g.n)
    if mode == "exact":
        if g.n > cfg.exact_n_limit:
            raise ExactLimitError(
                f"n={g.n} exceeds exact_n_limit={cfg.exact_n_limit}; use heuristic mode"
            )
        score, p = exact_best(g)
        return p, score_to_q(score, g.m), True
    score, p = _heuristic_best(g, cfg)
    return p, score_to_q(score, g.m), False


def is_optimal(
    g: Graph, t: Partition, cfg: SearchConfig = SearchConfig()
) -> tuple[bool, Optional[Partition]]:
    """Is t a modularity-maximizing partition of g?

    Exact mode is a certificate either way and hands back a maximizing
    witness when the answer is no. Heuristic mode can only refute: a True
    just means no counter-witness was found.
    """
    if g.m <= 0:
        raise ValueError("m > 0 required")
    t_score = partition_score(g, t)
    mode = cfg.resolve_mode(g.n)
    if mode == "exact":
        if g.n > cfg.exact_n_limit:
            raise ExactLimitError(
                f"n={g.n} exceeds exact_n_limit={cfg.exact_n_limit}; use heuristic mode"
            )
        best_score, best = exact_best(g)
        if t_score >= best_score:
            return True, None
        return False, best
    best_score, best = _heuristic_best(g, cfg)
    if best_score > t_score:
        return False, best
    return True, None
