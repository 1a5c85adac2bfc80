import itertools
from fractions import Fraction

import pytest

from modedge import (
    CandidateEdgeSet,
    EdgeDelta,
    Partition,
    apply_delta,
    assemble_master,
    build_disjunctive_cuts,
    build_partition_row,
    canonicalize,
    derive_swap_partition,
    graph_from_edges,
    match_clusters,
    misclassified,
    mccormick_couplings,
    modularity,
    solve_min,
)
from modedge.master import mccormick_rows
from modedge.modularity import partition_score
from modedge.search import exact_best

from conftest import random_graph, random_partition


def apply_z(g, cand, z):
    slot_pairs = cand.slot_pairs()
    acc = {}
    for s, bit in enumerate(z):
        if bit:
            acc[slot_pairs[s]] = acc.get(slot_pairs[s], 0) + 1
    if not acc:
        return g
    return apply_delta(g, EdgeDelta.from_pairs([(i, j, w) for (i, j), w in acc.items()]))


def test_candidate_set_validation():
    g = graph_from_edges(3, [(0, 1, 1)])
    with pytest.raises(ValueError):
        CandidateEdgeSet.for_addition(g, [(0, 1)])  # already an edge
    with pytest.raises(ValueError):
        CandidateEdgeSet(((0, 2), (0, 2)), (1, 1))  # duplicate
    with pytest.raises(ValueError):
        CandidateEdgeSet(((2, 0),), (1,))  # wrong orientation


def test_row_rejects_equal_partitions():
    g = graph_from_edges(3, [(0, 1, 1), (1, 2, 1)])
    t = Partition.from_assign([0, 0, 1])
    p = Partition.from_assign([1, 1, 0])  # same after canonicalization
    cand = CandidateEdgeSet.for_addition(g, [(0, 2)])
    with pytest.raises(ValueError):
        build_partition_row(g, t, p, cand)


def test_row_value_at_zero_is_scaled_gap():
    g = graph_from_edges(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
    t = Partition.from_assign([0, 0, 1, 1])
    p = Partition.from_assign([0, 1, 1, 0])
    cand = CandidateEdgeSet.for_addition(g, [(0, 2), (1, 3)])
    row = build_partition_row(g, t, p, cand)
    want = 4 * g.m * g.m * (modularity(g, t) - modularity(g, p))
    assert Fraction(row.value_at([0, 0])) == want


def test_row_identity_random(rnd):
    checked = 0
    while checked < 500:
        g = random_graph(rnd, rnd.randint(4, 8), p=0.45, wmax=2)
        if g is None:
            continue
        t = random_partition(rnd, g.n)
        p = random_partition(rnd, g.n)
        if canonicalize(t) == canonicalize(p):
            continue
        nonedges = [
            (i, j)
            for i in range(g.n)
            for j in range(i + 1, g.n)
            if g.adj[i, j] == 0
        ]
        rnd.shuffle(nonedges)
        pairs = tuple(sorted(nonedges[: rnd.randint(0, min(8, len(nonedges)))]))
        caps = tuple(rnd.choice([1, 1, 2]) for _ in pairs)
        cand = CandidateEdgeSet(pairs, caps)
        row = build_partition_row(g, t, p, cand)
        z = [rnd.randint(0, 1) for _ in range(cand.num_slots)]
        g2 = apply_z(g, cand, z)
        mbar = g.m + sum(z)
        gap = modularity(g2, canonicalize(t)) - modularity(g2, canonicalize(p))
        want = 4 * mbar * mbar * gap
        got = row.value_at(z)
        assert Fraction(got) == want
        assert (got > 0) == (gap > 0) and (got < 0) == (gap < 0)
        checked += 1


def test_mccormick_coupling_counts():
    g = graph_from_edges(4, [(0, 1, 1)])
    one = CandidateEdgeSet.for_addition(g, [(2, 3)])
    assert mccormick_couplings(one) == [(0, 0)]
    two = CandidateEdgeSet.for_addition(g, [(0, 2), (2, 3)])
    assert mccormick_couplings(two) == [(0, 0), (0, 1), (1, 1)]


def test_mccormick_rows_exact_at_binary_points():
    rows = mccormick_rows(2, 0, 1)
    for z1, z2 in itertools.product((0, 1), repeat=2):
        feasible_w = [
            w for w in (0, 1) if all(r.eval_lhs({0: z1, 1: z2, 2: w}) >= r.rhs for r in rows)
        ]
        assert feasible_w == [z1 * z2]


def test_swap_partition_move_case():
    t = Partition.from_assign([0, 0, 1, 1])
    pbar = Partition.from_assign([0, 1, 0, 1])
    # node 0's pbar-cluster {0, 2} reaches outside its t-cluster {0, 1}
    p2 = derive_swap_partition(t, pbar, 0)
    assert p2 == Partition.from_assign([1, 0, 1, 1])  # {1}, {0,2,3}


def test_swap_partition_split_case():
    t = Partition.from_assign([0, 0, 0, 0])
    pbar = Partition.from_assign([0, 0, 1, 1])
    p2 = derive_swap_partition(t, pbar, 2)
    assert p2 == Partition.from_assign([0, 0, 1, 1])


def test_swap_partition_rejects_correct_node():
    t = Partition.from_assign([0, 0, 1, 1])
    with pytest.raises(ValueError):
        derive_swap_partition(t, t, 0)


def test_swap_partition_never_empty(rnd):
    for _ in range(60):
        n = rnd.randint(3, 8)
        t = random_partition(rnd, n)
        pbar = random_partition(rnd, n)
        mm = match_clusters(t, pbar)
        for v in sorted(misclassified(t, pbar, mm)):
            p2 = derive_swap_partition(t, pbar, v)
            assert all(c for c in p2.clusters())
            assert p2.n == n


def test_cut_validity_exhaustive(rnd):
    # no z that keeps t optimal may violate a generated cut
    instances = 0
    while instances < 25:
        g = random_graph(rnd, rnd.randint(4, 7), p=0.5)
        if g is None or g.m < 2:
            continue
        t = canonicalize(random_partition(rnd, g.n, kmax=2))
        nonedges = [
            (i, j) for i in range(g.n) for j in range(i + 1, g.n) if g.adj[i, j] == 0
        ]
        rnd.shuffle(nonedges)
        pairs = tuple(sorted(nonedges[: min(7, len(nonedges))]))
        if not pairs:
            continue
        cand = CandidateEdgeSet.for_addition(g, pairs)
        _, pbar = exact_best(g)
        if pbar == t:
            continue
        mm = match_clusters(t, pbar)
        cuts = []
        for v in sorted(misclassified(t, pbar, mm)):
            t_c = {u for u in range(g.n) if t.assign[u] == t.assign[v]}
            p_c = {u for u in range(g.n) if pbar.assign[u] == pbar.assign[v]}
            if p_c <= t_c:
                continue
            p_prime = derive_swap_partition(t, pbar, v)
            cuts.extend(build_disjunctive_cuts(g, t, p_prime, v, cand))
        if not cuts:
            continue
        instances += 1
        for z in itertools.product((0, 1), repeat=len(pairs)):
            g2 = apply_z(g, cand, list(z))
            best, _ = exact_best(g2)
            if partition_score(g2, t) >= best:
                for cut in cuts:
                    assert cut.satisfied_at(list(z))


def test_violated_cut_implies_swap_wins(rnd):
    # when both branches fail, the swap partition strictly beats t
    checked = 0
    while checked < 200:
        g = random_graph(rnd, rnd.randint(4, 7), p=0.5)
        if g is None or g.m < 2:
            continue
        t = canonicalize(random_partition(rnd, g.n, kmax=2))
        pbar = canonicalize(random_partition(rnd, g.n, kmax=3))
        mm = match_clusters(t, pbar)
        mset = misclassified(t, pbar, mm)
        if not mset:
            continue
        nonedges = [
            (i, j) for i in range(g.n) for j in range(i + 1, g.n) if g.adj[i, j] == 0
        ]
        pairs = tuple(sorted(nonedges[:6]))
        if not pairs:
            continue
        cand = CandidateEdgeSet.for_addition(g, pairs)
        for v in sorted(mset):
            t_c = {u for u in range(g.n) if t.assign[u] == t.assign[v]}
            p_c = {u for u in range(g.n) if pbar.assign[u] == pbar.assign[v]}
            if p_c <= t_c:
                continue
            p_prime = derive_swap_partition(t, pbar, v)
            cuts = build_disjunctive_cuts(g, t, p_prime, v, cand)
            for z in itertools.product((0, 1), repeat=len(pairs)):
                if any(cut.satisfied_at(list(z)) for cut in cuts):
                    continue
                g2 = apply_z(g, cand, list(z))
                assert partition_score(g2, t) < partition_score(g2, p_prime)
                checked += 1
            break


def test_cut_rejects_base_violator():
    # hand-built: t wants node 2 with {3}, but 2 hangs off cluster {0, 1}
    g = graph_from_edges(4, [(0, 1, 3), (0, 2, 2), (1, 2, 2), (2, 3, 1)])
    t = canonicalize(Partition.from_assign([0, 0, 1, 1]))
    pbar, = [p for s, p in [exact_best(g)]]
    cand = CandidateEdgeSet.for_addition(g, [(0, 3), (1, 3)])
    mm = match_clusters(t, pbar)
    mset = misclassified(t, pbar, mm)
    assert mset
    v = sorted(mset)[0]
    p_prime = derive_swap_partition(t, pbar, v)
    cuts = build_disjunctive_cuts(g, t, p_prime, v, cand)
    assert any(not cut.satisfied_at([0, 0]) for cut in cuts)


def test_assemble_empty_pool_optimum_zero():
    g = graph_from_edges(4, [(0, 1, 1), (2, 3, 1)])
    t = Partition.from_assign([0, 0, 1, 1])
    cand = CandidateEdgeSet.for_addition(g, [(0, 2)])
    bp = assemble_master(g, t, [], [], cand, floor=0)
    out = solve_min(bp)
    assert out.status == "optimal" and out.objective_value == 0


def test_assemble_single_row_needs_one_edge():
    # path 0-1-2-3 with t merging the ends' clusters; one row forces an edge
    g = graph_from_edges(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
    t = canonicalize(Partition.from_assign([0, 0, 1, 1]))
    p = canonicalize(Partition.from_assign([0, 1, 1, 1]))
    cand = CandidateEdgeSet.for_addition(g, [(0, 2), (0, 3)])
    row = build_partition_row(g, t, p, cand)
    if row.value_at([0, 0]) >= 0:
        # p does not beat t on the base graph; nothing to force
        assert solve_min(assemble_master(g, t, [p], [], cand)).objective_value == 0
    else:
        out = solve_min(assemble_master(g, t, [p], [], cand))
        assert out.status == "optimal" and out.objective_value >= 1


def test_assemble_infeasible_singleton_truth():
    # a positive-degree node alone in its ground-truth cluster with no fix
    g = graph_from_edges(2, [(0, 1, 1)])
    t = Partition.from_assign([0, 1])
    merged = Partition.from_assign([0, 0])
    cand = CandidateEdgeSet((), ())
    bp = assemble_master(g, t, [merged], [], cand)
    assert solve_min(bp).status == "infeasible"


def test_assemble_monotone(rnd):
    for _ in range(20):
        g = random_graph(rnd, rnd.randint(4, 7))
        if g is None:
            continue
        t = canonicalize(random_partition(rnd, g.n, kmax=2))
        ps = []
        for _ in range(3):
            p = canonicalize(random_partition(rnd, g.n, kmax=3))
            if p != t and p not in ps:
                ps.append(p)
        if len(ps) < 2:
            continue
        nonedges = [
            (i, j) for i in range(g.n) for j in range(i + 1, g.n) if g.adj[i, j] == 0
        ]
        cand = CandidateEdgeSet.for_addition(g, nonedges[:6])
        prev = None
        for upto in range(len(ps) + 1):
            out = solve_min(assemble_master(g, t, ps[:upto], [], cand))
            val = out.objective_value if out.status == "optimal" else float("inf")
            if prev is not None:
                assert val >= prev
            prev = val


def test_strict_rows_demand_margin():
    # two components tie under t vs the merged partition after one addition;
    # strict mode must spend more than non-strict on ties
    g = graph_from_edges(4, [(0, 1, 1), (2, 3, 1)])
    t = Partition.from_assign([0, 0, 1, 1])
    out_ns = solve_min(assemble_master(g, t, [Partition.from_assign([0] * 4)], [], CandidateEdgeSet((), ())))
    assert out_ns.status == "optimal"  # t already beats the single cluster
    out_strict = solve_min(
        assemble_master(
            g, t, [Partition.from_assign([0] * 4)], [], CandidateEdgeSet((), ()), strict=True
        )
    )
    assert out_strict.status == "optimal"  # strictly beats it too (1/2 > 0)
