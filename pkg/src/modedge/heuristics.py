"""Greedy edge addition and removal heuristics.

Addition walks the misclassified nodes in order of how badly their
ground-truth cluster is broken up, adds the unit edge that disturbs the
cluster least, and re-solves the subproblem, until the optimum matches the
ground truth cluster for cluster. Removal repeatedly sweeps the edge units
in a configurable order and drops any unit whose removal provably keeps the
target partition on top.

A removal is accepted only when the target stays the *unambiguous* optimum:
the exact backend demands a strictly unique argmax, the Louvain backend
demands that its best-of-restarts partition equals the target. Plain
"target still shares the maximum" would accept stripping clusters down to
isolated nodes, which only ever ties and defeats the point of a backbone.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .align import match_clusters, misclassified
from .graph import Graph, Partition, EdgeDelta, apply_delta, canonicalize
from .modularity import delta_v_score, partition_score, score_to_q
from .rowgen import SolveReport
from .search import SearchConfig, exact_best, _heuristic_best

__all__ = [
    "HeuristicConfig",
    "order_misclassified",
    "heuristic_edge_addition",
    "heuristic_edge_removal",
    "post_process",
    "cross_cluster_preprocess",
    "star_lower_bound",
]


@dataclass(frozen=True)
class HeuristicConfig:
    """Settings shared by the addition and removal heuristics.

    In weighted mode edges may receive extra weight up to a per-pair cap:
    ``capacity(i, j)`` is ``capacity_overrides`` when present, otherwise
    ``capacity_default``. Unweighted mode adds only brand-new unit edges.
    removal_rule: 1 input order, 2 seeded permutation per pass, 3 static
    modularity-matrix order, 4 the same but recomputed each pass.
    """

    weighted: bool = False
    capacity_default: int = 1
    capacity_overrides: dict = field(default_factory=dict)
    removal_rule: int = 1
    seed: int = 0
    search: SearchConfig = SearchConfig()

    def __post_init__(self):
        if self.removal_rule not in (1, 2, 3, 4):
            raise ValueError("removal_rule must be 1, 2, 3 or 4")
        if self.weighted and self.capacity_default < 1:
            raise ValueError("weighted mode needs a positive default capacity")

    def capacity(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        return int(self.capacity_overrides.get((i, j), self.capacity_default))


def star_lower_bound(t: Partition) -> int:
    """n - k: a spanning star per cluster is the sparsest connected shape."""
    return t.n - t.k


def order_misclassified(t: Partition, p: Partition, m_set: set[int]) -> list[int]:
    """Misclassified nodes, most-broken cluster first.

    Sorts by the fraction of missing ground-truth co-members,
    |C^T(u) \\ C^P(u)| / (|C^T(u)| - 1), descending; ties break on node
    index. A singleton ground-truth cluster showing up here means no edge
    can fix it, which the caller must treat as infeasible.
    """
    t_clusters = t.clusters()
    keys = []
    for u in m_set:
        ct = t_clusters[t.assign[u]]
        if len(ct) == 1:
            raise ValueError(
                f"misclassified node {u} is alone in its ground-truth cluster"
            )
        missing = sum(1 for x in ct if x != u and p.assign[x] != p.assign[u])
        keys.append((-Fraction(missing, len(ct) - 1), u))
    return [u for _, u in sorted(keys)]


def _subproblem_best(g: Graph, cfg: SearchConfig) -> tuple[int, Partition, bool]:
    if cfg.resolve_mode(g.n) == "exact":
        score, p = exact_best(g)
        return score, p, True
    score, p = _heuristic_best(g, cfg)
    return score, p, False


def _still_target(g: Graph, t: Partition, cfg: SearchConfig) -> bool:
    """Would the subproblem still name t as the optimum of g?

    Exact backend: t must beat every other partition strictly. Heuristic
    backend: the best-of-restarts partition must equal t.
    """
    if g.m <= 0:
        return False
    if cfg.resolve_mode(g.n) == "exact":
        best_other, _ = exact_best(g, exclude=t)
        return partition_score(g, t) > best_other
    _, p = _heuristic_best(g, cfg)
    return canonicalize(p) == canonicalize(t)


def heuristic_edge_addition(
    g: Graph, t: Partition, cfg: HeuristicConfig = HeuristicConfig()
) -> tuple[EdgeDelta, SolveReport]:
    """Greedy unit additions until the ground truth matches the optimum.

    Each round: solve the subproblem, align clusters, and if any node is
    misclassified add one unit between the highest-priority node u and the
    candidate v in u's ground-truth cluster minimizing the local modularity
    score. Candidates are first restricted to nodes u should but does not
    currently share a cluster with; if that set is empty for every
    misclassified node, the restriction is relaxed to the whole cluster.
    Weighted mode allows stacking weight on existing edges up to capacity.
    """
    if g.m <= 0:
        raise ValueError("m > 0 required")
    t = canonicalize(t)
    started = time.monotonic()

    current = g
    added_units: list[tuple[int, int]] = []
    pool: list[Partition] = []
    trace: list[int] = []
    exact_backend = True
    status = "success"

    if cfg.weighted:
        budget = 0
        for i in range(g.n):
            for j in range(i + 1, g.n):
                budget += max(0, cfg.capacity(i, j) - int(g.adj[i, j]))
    else:
        budget = sum(
            1
            for i in range(g.n)
            for j in range(i + 1, g.n)
            if g.adj[i, j] == 0
        )

    def addable(u: int, v: int) -> bool:
        if u == v:
            return False
        if cfg.weighted:
            return int(current.adj[u, v]) < cfg.capacity(u, v)
        return current.adj[u, v] == 0

    qt = qb = None
    while True:
        score, p, exact_here = _subproblem_best(current, cfg.search)
        exact_backend = exact_backend and exact_here
        if not pool or pool[-1] != p:
            pool.append(p)
        mm = match_clusters(t, p)
        m_set = misclassified(t, p, mm)
        qt = score_to_q(partition_score(current, t), current.m)
        qb = score_to_q(score, current.m)
        if not m_set:
            break
        if len(added_units) >= budget:
            status = "infeasible"
            break

        try:
            ordered = order_misclassified(t, p, m_set)
        except ValueError:
            status = "infeasible"
            break
        t_clusters = t.clusters()
        choice = None
        for relax in (False, True):
            for u in ordered:
                ct = t_clusters[t.assign[u]]
                cand = [
                    v
                    for v in ct
                    if addable(u, v) and (relax or p.assign[v] != p.assign[u])
                ]
                if not cand:
                    continue
                best_v, best_score = None, None
                for v in sorted(cand):
                    s = delta_v_score(current, t, u, v)
                    if best_score is None or s < best_score:
                        best_v, best_score = v, s
                choice = (u, best_v)
                break
            if choice:
                break
        if choice is None:
            status = "infeasible"
            break
        u, v = choice
        i, j = (u, v) if u < v else (v, u)
        current = apply_delta(current, EdgeDelta(((i, j, 1),)))
        added_units.append((i, j))
        trace.append(len(added_units))

    delta = EdgeDelta.from_pairs([(i, j, 1) for i, j in added_units])
    report = SolveReport(
        status=status,
        delta=delta,
        iterations=len(added_units),
        partition_pool=tuple(pool),
        objective_trace=tuple(trace),
        q_t_final=qt,
        q_best_final=qb,
        exact=exact_backend,
        timings={"total": time.monotonic() - started},
        detail={"added_units": list(added_units)},
    )
    return delta, report


def _modularity_matrix_order(g: Graph, units: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Units sorted by decreasing modularity-matrix value, ties lexicographic.

    Comparing A_ij - d_i d_j / 2m across pairs of one graph is the same as
    comparing 2m A_ij - d_i d_j, which stays in integers.
    """
    two_m = 2 * g.m

    def key(unit):
        i, j = unit
        return (-(two_m * int(g.adj[i, j]) - int(g.degrees[i]) * int(g.degrees[j])), i, j)

    return sorted(units, key=key)


def _expand_units(g: Graph) -> list[tuple[int, int]]:
    units = []
    for i, j, w in g.edges():
        units.extend([(i, j)] * w)
    return units


def heuristic_edge_removal(
    g: Graph,
    t: Partition,
    cfg: HeuristicConfig = HeuristicConfig(),
    unit_order: Optional[Sequence[tuple[int, int]]] = None,
) -> tuple[EdgeDelta, SolveReport]:
    """Sweep edge units, dropping any whose removal keeps t the optimum.

    Sweeps repeat until one full pass removes nothing, so the result is
    1-minimal: removing any single remaining unit would change the optimum.
    ``unit_order`` restricts and orders the considered units explicitly
    (used by post-processing); otherwise the configured rule orders the
    full edge multiset each pass.
    """
    if g.m <= 0:
        raise ValueError("m > 0 required")
    t = canonicalize(t)
    started = time.monotonic()
    if not _still_target(g, t, cfg.search):
        raise ValueError("t is not the optimal partition of the input graph")

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    static_order = None
    if unit_order is not None:
        static_order = [((i, j) if i < j else (j, i)) for i, j in unit_order]
    elif cfg.removal_rule == 3:
        static_order = _modularity_matrix_order(g, _expand_units(g))

    current = g
    removed: list[tuple[int, int]] = []
    passes = 0
    trace: list[int] = []
    exact_backend = cfg.search.resolve_mode(g.n) == "exact"

    while True:
        passes += 1
        if static_order is not None:
            order = [u for u in static_order if current.adj[u[0], u[1]] > 0]
        elif cfg.removal_rule == 1:
            order = _expand_units(current)
        elif cfg.removal_rule == 2:
            arr = np.array(_expand_units(current), dtype=np.int64)
            rng.shuffle(arr)
            order = [(int(i), int(j)) for i, j in arr]
        else:  # rule 4: recompute the matrix order on the current graph
            order = _modularity_matrix_order(current, _expand_units(current))

        pass_removed = 0
        for i, j in order:
            if current.adj[i, j] == 0:
                continue
            trial = apply_delta(current, EdgeDelta(((i, j, -1),)))
            if trial.m > 0 and _still_target(trial, t, cfg.search):
                current = trial
                removed.append((i, j))
                pass_removed += 1
        trace.append(current.m)
        if pass_removed == 0:
            break

    delta = EdgeDelta.from_pairs([(i, j, -1) for i, j in removed])
    report = SolveReport(
        status="success",
        delta=delta,
        iterations=passes,
        partition_pool=(t,),
        objective_trace=tuple(trace),
        q_t_final=score_to_q(partition_score(current, t), current.m),
        q_best_final=None,
        exact=exact_backend,
        timings={"total": time.monotonic() - started},
        detail={"removed_units": list(removed), "remaining_weight": current.m},
    )
    return delta, report


def post_process(
    g: Graph,
    t: Partition,
    added: EdgeDelta,
    cfg: HeuristicConfig = HeuristicConfig(),
    order: Optional[Sequence[tuple[int, int]]] = None,
) -> EdgeDelta:
    """Drop added units that later additions made redundant.

    Runs the removal sweep on the augmented graph restricted to the added
    units, in the order they were added (or the delta's pair order when the
    unit order was not kept). Never grows the delta.
    """
    augmented = apply_delta(g, added)
    if not _still_target(augmented, t, cfg.search):
        raise ValueError("the added delta does not make t optimal")
    units = list(order) if order is not None else [
        (i, j) for i, j, w in added.pairs for _ in range(w)
    ]
    removal, _ = heuristic_edge_removal(augmented, t, cfg, unit_order=units)
    kept: dict[tuple[int, int], int] = {}
    for i, j, w in added.pairs:
        kept[(i, j)] = w
    for i, j, w in removal.pairs:
        kept[(i, j)] = kept.get((i, j), 0) + w  # w is negative
    return EdgeDelta.from_pairs([(i, j, w) for (i, j), w in kept.items() if w > 0])


def cross_cluster_preprocess(
    g: Graph,
    t: Partition,
    cfg: HeuristicConfig = HeuristicConfig(),
    bulk_only: bool = False,
) -> EdgeDelta:
    """Remove edges crossing cluster boundaries of t.

    Tries the bulk removal first; if the optimum moves (or the graph would
    empty), falls back to removing cross edges one at a time, keeping only
    the safe ones. ``bulk_only`` skips the safety check entirely and simply
    reports the bulk removal.
    """
    t = canonicalize(t)
    cross = [
        (i, j, -int(g.adj[i, j]))
        for i in range(g.n)
        for j in range(i + 1, g.n)
        if g.adj[i, j] and t.assign[i] != t.assign[j]
    ]
    if not cross:
        return EdgeDelta(())
    bulk = EdgeDelta.from_pairs(cross)
    if bulk_only:
        return bulk
    stripped = apply_delta(g, bulk)
    if stripped.m > 0 and _still_target(stripped, t, cfg.search):
        return bulk

    current = g
    removed: list[tuple[int, int, int]] = []
    for i, j, neg_w in bulk.pairs:
        for _ in range(-neg_w):
            trial = apply_delta(current, EdgeDelta(((i, j, -1),)))
            if trial.m > 0 and _still_target(trial, t, cfg.search):
                current = trial
                removed.append((i, j, -1))
    return EdgeDelta.from_pairs(removed)
