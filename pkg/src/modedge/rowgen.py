"""Row generation for edge addition and for sparsification.

Each iteration solves the master program over the partitions discovered so
far, augments the graph with the chosen units, and asks the subproblem for a
modularity-maximizing partition of the result. Exact equality of the scaled
scores of the ground truth and the subproblem optimum certifies optimality;
otherwise the new partition (and optionally swap partitions plus disjunctive
cuts) joins the pool and the objective floor rises to the attained value.

Sparsification runs the identical loop in a kept-units encoding: the base
graph is the input stripped of all candidate capacity, every slot re-adds
one unit, and minimizing kept weight is maximizing removed weight.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bip import solve_min
from .graph import Graph, Partition, EdgeDelta, apply_delta, canonicalize
from .master import (
    CandidateEdgeSet,
    CutBranch,
    DisjunctiveCut,
    assemble_master,
    build_disjunctive_cuts,
    derive_swap_partition,
)
from .align import match_clusters, misclassified
from .modularity import Fraction, partition_score, score_to_q
from .search import (
    SearchConfig,
    ExactLimitError,
    exact_best,
    is_optimal,
    maximize_modularity,
    _heuristic_best,
)

__all__ = [
    "RowGenConfig",
    "SolveReport",
    "solve_edge_addition",
    "solve_sparsification",
    "verify_certificate",
]


@dataclass(frozen=True)
class RowGenConfig:
    """Knobs for the row-generation loop.

    ``strict`` asks for the ground truth to be the unique optimum (rows get
    a margin of one scaled unit). None picks the mode default: off for edge
    addition, on for sparsification, where non-strict feasibility degenerates
    (stripping a cluster to isolated nodes only ever ties, so nearly
    everything could be removed while the target partition still shares the
    maximum).
    """

    search: SearchConfig = SearchConfig()
    use_cuts: bool = False  # augmented variant: swap partitions + disjunctive cuts
    strict: Optional[bool] = None
    initial_partitions: tuple[Partition, ...] = ()
    max_iterations: Optional[int] = None
    node_limit: Optional[int] = None  # per master solve
    time_limit: Optional[float] = None  # seconds, whole run


@dataclass
class SolveReport:
    """Outcome of a solve, heuristic or exact.

    status is one of "optimal", "heuristically_verified", "success",
    "infeasible", "limit". Exact backends produce "optimal"; when only the
    heuristic subproblem ran, a converged run is downgraded to
    "heuristically_verified". The objective trace is the master objective
    per iteration (added units, or kept units for sparsification) and is
    non-decreasing by construction.
    """

    status: str
    delta: EdgeDelta
    iterations: int
    partition_pool: tuple[Partition, ...]
    objective_trace: tuple[int, ...]
    q_t_final: Optional[Fraction] = None
    q_best_final: Optional[Fraction] = None
    exact: bool = True
    timings: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status in ("optimal", "heuristically_verified", "success")


def _subproblem(
    g: Graph, cfg: SearchConfig, exclude: Optional[Partition] = None
) -> tuple[int, Partition, bool]:
    """Best (score, partition, exact?) for the current augmented graph."""
    mode = cfg.resolve_mode(g.n)
    if mode == "exact":
        if g.n > cfg.exact_n_limit:
            raise ExactLimitError(f"n={g.n} beyond exact_n_limit={cfg.exact_n_limit}")
        score, p = exact_best(g, exclude=exclude)
        return score, p, True
    score, p = _heuristic_best(g, cfg)
    if exclude is not None and p == exclude:
        # heuristic landed exactly on the excluded partition; no usable
        # counter-witness, treat as "nothing better found"
        return -(1 << 62), p, False
    return score, p, False


def _slots_to_delta(cand: CandidateEdgeSet, assignment: Sequence[int]) -> EdgeDelta:
    per_pair: dict[tuple[int, int], int] = {}
    for s, (i, j) in enumerate(cand.slot_pairs()):
        if assignment[s]:
            per_pair[(i, j)] = per_pair.get((i, j), 0) + 1
    return EdgeDelta.from_pairs([(i, j, w) for (i, j), w in per_pair.items()])


def _row_generation(
    base: Graph,
    t: Partition,
    cand: CandidateEdgeSet,
    cfg: RowGenConfig,
    extra_rows: Sequence[CutBranch] = (),
    strict: bool = False,
) -> SolveReport:
    t = canonicalize(t)
    started = time.monotonic()
    timings = {"master": 0.0, "subproblem": 0.0}

    pool: list[Partition] = []
    for p in cfg.initial_partitions:
        p = canonicalize(p)
        if p != t and p not in pool:
            pool.append(p)
    cuts: list[DisjunctiveCut] = []
    floor = 0
    trace: list[int] = []
    exact_backend = True

    def report(status: str, delta: EdgeDelta, qt=None, qb=None, **detail) -> SolveReport:
        timings["total"] = time.monotonic() - started
        return SolveReport(
            status=status,
            delta=delta,
            iterations=len(trace),
            partition_pool=tuple(pool),
            objective_trace=tuple(trace),
            q_t_final=qt,
            q_best_final=qb,
            exact=exact_backend,
            timings=timings,
            detail=detail,
        )

    iteration = 0
    while True:
        iteration += 1
        if cfg.max_iterations is not None and iteration > cfg.max_iterations:
            return report("limit", EdgeDelta(()), reason="iteration limit")
        if cfg.time_limit is not None and time.monotonic() - started > cfg.time_limit:
            return report("limit", EdgeDelta(()), reason="time limit")

        t0 = time.monotonic()
        program = assemble_master(
            base, t, pool, cuts, cand, floor=floor, extra_rows=extra_rows, strict=strict
        )
        outcome = solve_min(program, node_limit=cfg.node_limit)
        timings["master"] += time.monotonic() - t0

        if outcome.status == "infeasible":
            return report("infeasible", EdgeDelta(()))
        if outcome.status == "limit":
            return report("limit", EdgeDelta(()), bound=outcome.bound, reason="node limit")

        assert outcome.assignment is not None
        delta = _slots_to_delta(cand, outcome.assignment)
        trace.append(outcome.objective_value)
        augmented = apply_delta(base, delta) if len(delta) else base

        t0 = time.monotonic()
        best_score, pbar, exact_here = _subproblem(
            augmented, cfg.search, exclude=t if strict else None
        )
        timings["subproblem"] += time.monotonic() - t0
        exact_backend = exact_backend and exact_here

        t_score = partition_score(augmented, t)
        m2 = augmented.m
        converged = t_score > best_score if strict else t_score >= best_score
        if converged:
            status = "optimal" if exact_backend else "heuristically_verified"
            return report(
                status,
                delta,
                qt=score_to_q(t_score, m2),
                qb=score_to_q(max(best_score, t_score), m2),
            )

        floor = outcome.objective_value
        pbar = canonicalize(pbar)
        if pbar != t and pbar not in pool:
            pool.append(pbar)
        if cfg.use_cuts:
            _augment_with_cuts(base, t, pbar, cand, pool, cuts)


def _augment_with_cuts(
    base: Graph,
    t: Partition,
    pbar: Partition,
    cand: CandidateEdgeSet,
    pool: list[Partition],
    cuts: list[DisjunctiveCut],
) -> None:
    """Swap partitions and disjunctive cuts for the misclassified nodes."""
    mm = match_clusters(t, pbar)
    mset = misclassified(t, pbar, mm)
    t_sets = [set(c) for c in t.clusters()]
    p_sets = [set(c) for c in pbar.clusters()]

    def pool_add(p: Partition) -> None:
        if p != t and p not in pool:
            pool.append(p)

    for v in sorted(mset):
        p_cluster = p_sets[pbar.assign[v]]
        if any(p_cluster <= ts for ts in t_sets):
            continue  # handled below via the split partitions
        p_prime = derive_swap_partition(t, pbar, v)
        pool_add(p_prime)
        cuts.extend(build_disjunctive_cuts(base, t, p_prime, v, cand))

    for p_cluster in p_sets:
        for cid, t_cluster in enumerate(t_sets):
            if p_cluster < t_cluster:  # proper subset: split it off
                assign = list(t.assign)
                fresh = t.k
                for u in p_cluster:
                    assign[u] = fresh
                pool_add(Partition.from_assign(assign))


def solve_edge_addition(
    g: Graph, t: Partition, cand: CandidateEdgeSet, cfg: RowGenConfig = RowGenConfig()
) -> SolveReport:
    """Minimum unit additions from ``cand`` making t modularity-optimal."""
    if g.m <= 0:
        raise ValueError("m > 0 required")
    for i, j in cand.pairs:
        if g.adj[i, j] != 0:
            raise ValueError(f"candidate ({i}, {j}) is already an edge")
    strict = bool(cfg.strict) if cfg.strict is not None else False
    return _row_generation(g, t, cand, cfg, strict=strict)


def solve_sparsification(g: Graph, cfg: RowGenConfig = RowGenConfig()) -> SolveReport:
    """Fewest kept units preserving the modularity-optimal partition.

    The target partition is computed from the input graph first. Known to
    stall beyond desk scale; intended for small instances and oracles.
    """
    if g.m <= 0:
        raise ValueError("m > 0 required")
    t, _, t_exact = maximize_modularity(g, cfg.search)
    cand = CandidateEdgeSet.for_sparsification(g)
    stripped = np.array(g.adj)
    for (i, j), cap in zip(cand.pairs, cand.capacities):
        stripped[i, j] -= cap
        stripped[j, i] -= cap
    base = Graph(stripped)
    # Any feasible sub-network has at least one unit of weight: modularity
    # is undefined on an empty graph.
    keep_one = CutBranch(tuple((s, 1) for s in range(cand.num_slots)), 0, 1)
    strict = bool(cfg.strict) if cfg.strict is not None else True
    rep = _row_generation(base, t, cand, cfg, extra_rows=(keep_one,), strict=strict)
    if rep.ok:
        kept: dict[tuple[int, int], int] = {p: 0 for p in cand.pairs}
        for i, j, w in rep.delta.pairs:
            kept[(i, j)] = w
        removal = EdgeDelta.from_pairs(
            [(i, j, kept[(i, j)] - cap) for (i, j), cap in zip(cand.pairs, cand.capacities)]
        )
        rep.delta = removal
        rep.detail["kept_weight"] = sum(kept.values())
        rep.detail["removed_weight"] = cand.total_capacity() - sum(kept.values())
        rep.detail["target_partition"] = t
        rep.exact = rep.exact and t_exact
        if rep.status == "optimal" and not rep.exact:
            rep.status = "heuristically_verified"
    return rep


def verify_certificate(
    g: Graph, t: Partition, delta: EdgeDelta, search: SearchConfig = SearchConfig()
) -> bool:
    """Does applying delta make t modularity-optimal?

    Exact certificate when the exact backend applies; otherwise true means
    no counter-witness was found by the heuristic.
    """
    g2 = apply_delta(g, delta) if len(delta) else g
    ok, _ = is_optimal(g2, canonicalize(t), search)
    return ok
