"""Master problem construction for the row-generation loop.

Candidate edges come in unit "slots" (a pair with capacity c contributes c
binary slots), each slot adding one unit of weight to its pair on top of a
base graph. For a partition P != T, the partition row is the multiplied-out
polynomial identity

    row(z, w) = 4 * (m + sum z)^2 * (Q_T(base + z) - Q_P(base + z)),

linear in the slot variables z and in product variables w = z_a * z_b, so
"row >= 0" is exactly "T scores at least P" after the additions. Product
variables are tied to their factors by McCormick couplings, which are exact
at binary points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .bip import BinaryProgram, Coupling, LinearRow
from .graph import Graph, Partition, canonicalize

__all__ = [
    "CandidateEdgeSet",
    "PartitionRow",
    "CutBranch",
    "DisjunctiveCut",
    "build_partition_row",
    "mccormick_couplings",
    "mccormick_rows",
    "derive_swap_partition",
    "build_disjunctive_cuts",
    "assemble_master",
]


@dataclass(frozen=True)
class CandidateEdgeSet:
    """Ordered candidate pairs with per-pair unit capacities.

    Addition mode uses non-edges with capacity 1; sparsification uses the
    edge set with capacity equal to the current weight (each unit of weight
    becomes one keep/drop slot).
    """

    pairs: tuple[tuple[int, int], ...]
    capacities: tuple[int, ...]

    def __post_init__(self):
        seen = set()
        for (i, j), cap in zip(self.pairs, self.capacities, strict=True):
            if i >= j:
                raise ValueError(f"candidate pair must have i < j, got ({i}, {j})")
            if (i, j) in seen:
                raise ValueError(f"duplicate candidate pair ({i}, {j})")
            if cap < 1:
                raise ValueError(f"capacity of ({i}, {j}) must be >= 1")
            seen.add((i, j))

    @staticmethod
    def for_addition(g: Graph, pairs: Sequence[tuple[int, int]]) -> "CandidateEdgeSet":
        for i, j in pairs:
            if g.adj[min(i, j), max(i, j)] != 0:
                raise ValueError(f"candidate ({i}, {j}) is already an edge")
        norm = tuple((min(i, j), max(i, j)) for i, j in pairs)
        return CandidateEdgeSet(norm, (1,) * len(norm))

    @staticmethod
    def for_sparsification(g: Graph) -> "CandidateEdgeSet":
        edges = g.edges()
        return CandidateEdgeSet(
            tuple((i, j) for i, j, _ in edges), tuple(w for _, _, w in edges)
        )

    @property
    def num_slots(self) -> int:
        return sum(self.capacities)

    def slot_pairs(self) -> list[tuple[int, int]]:
        """Pair of each slot, capacity-expanded in candidate order."""
        out = []
        for (i, j), cap in zip(self.pairs, self.capacities):
            out.extend([(i, j)] * cap)
        return out

    def total_capacity(self) -> int:
        return sum(self.capacities)


def _wkey(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a <= b else (b, a)


@dataclass
class PartitionRow:
    """Sparse row over slots and slot products: z @ zcoef + w @ wcoef + const >= rhs."""

    zcoef: dict[int, int]
    wcoef: dict[tuple[int, int], int]
    const: int
    rhs: int = 0

    def value_at(self, zvec: Sequence[int]) -> int:
        """Left side minus rhs at a binary point, products substituted."""
        total = self.const - self.rhs
        for s, c in self.zcoef.items():
            total += c * zvec[s]
        for (a, b), c in self.wcoef.items():
            total += c * zvec[a] * zvec[b]
        return total

    def satisfied_at(self, zvec: Sequence[int]) -> bool:
        return self.value_at(zvec) >= 0


def build_partition_row(
    g: Graph, t: Partition, p: Partition, cand: CandidateEdgeSet
) -> PartitionRow:
    """Row enforcing Q_T >= Q_P over all unit additions from ``cand``.

    At any binary z (with w = products) the row's value is exactly
    4 (m + sum z)^2 (Q_T - Q_P) on the augmented graph.
    """
    t = canonicalize(t)
    p = canonicalize(p)
    if t == p:
        raise ValueError("partitions coincide; the row would be vacuous")

    m = g.m
    d = g.degrees
    slots = cand.slot_pairs()
    nslots = len(slots)
    touch: dict[int, list[int]] = {}
    on_pair: dict[tuple[int, int], list[int]] = {}
    for s, (i, j) in enumerate(slots):
        touch.setdefault(i, []).append(s)
        touch.setdefault(j, []).append(s)
        on_pair.setdefault((i, j), []).append(s)

    zcoef: dict[int, int] = {}
    wcoef: dict[tuple[int, int], int] = {}
    const = 0

    def add_z(s: int, c: int) -> None:
        zcoef[s] = zcoef.get(s, 0) + c

    def add_w(a: int, b: int, c: int) -> None:
        if a == b:  # z is binary, z*z = z
            add_z(a, c)
        else:
            k = _wkey(a, b)
            wcoef[k] = wcoef.get(k, 0) + c

    for i in range(g.n):
        for j in range(i + 1, g.n):
            same_t = t.assign[i] == t.assign[j]
            same_p = p.assign[i] == p.assign[j]
            if same_t == same_p:
                continue
            kappa = 2 if same_t else -2  # ordered pairs (i,j) and (j,i)
            a_ij = int(g.adj[i, j])
            di, dj = int(d[i]), int(d[j])
            const += kappa * (2 * m * a_ij - di * dj)
            if a_ij:
                for s in range(nslots):
                    add_z(s, kappa * 2 * a_ij)
            for s in on_pair.get((i, j), ()):
                add_z(s, kappa * 2 * m)
                for s2 in range(nslots):
                    add_w(s, s2, kappa * 2)
            for s in touch.get(i, ()):
                add_z(s, -kappa * dj)
            for s in touch.get(j, ()):
                add_z(s, -kappa * di)
            for a in touch.get(i, ()):
                for b in touch.get(j, ()):
                    add_w(a, b, -kappa)

    zcoef = {s: c for s, c in zcoef.items() if c != 0}
    wcoef = {k: c for k, c in wcoef.items() if c != 0}
    return PartitionRow(zcoef, wcoef, const)


def mccormick_couplings(cand: CandidateEdgeSet) -> list[tuple[int, int]]:
    """All unordered slot pairs (a, b), a <= b, that products can form.

    A pair with a == b is the self-coupling w = z (binaries square to
    themselves) and never becomes a separate variable.
    """
    n = cand.num_slots
    return [(a, b) for a in range(n) for b in range(a, n)]


def mccormick_rows(w_id: int, z1_id: int, z2_id: int) -> list[LinearRow]:
    """The four envelope rows for w = z1 * z2, for backends that need them."""
    return [
        LinearRow(((z1_id, 1), (w_id, -1)), 0),  # w <= z1
        LinearRow(((z2_id, 1), (w_id, -1)), 0),  # w <= z2
        LinearRow(((w_id, 1),), 0),  # w >= 0
        LinearRow(((w_id, 1), (z1_id, -1), (z2_id, -1)), -1),  # w >= z1 + z2 - 1
    ]


def derive_swap_partition(t: Partition, pbar: Partition, v: int) -> Partition:
    """The competing partition generated for a misclassified node v.

    If v's pbar-cluster reaches outside v's ground-truth cluster, v moves to
    the ground-truth cluster of the lowest-index such outside companion.
    If the pbar-cluster sits strictly inside v's ground-truth cluster, that
    cluster is split in two along it. When the two clusters coincide v is
    correctly classified under every maximum matching and there is nothing
    to derive.
    """
    t = canonicalize(t)
    pbar = canonicalize(pbar)
    t_cluster = {u for u in range(t.n) if t.assign[u] == t.assign[v]}
    p_cluster = {u for u in range(t.n) if pbar.assign[u] == pbar.assign[v]}
    if t_cluster == p_cluster:
        raise ValueError(f"node {v} is not misclassified: its clusters coincide")
    outside = sorted(p_cluster - t_cluster)
    assign = list(t.assign)
    if outside:
        assign[v] = t.assign[outside[0]]
    else:
        fresh = t.k
        for u in sorted(p_cluster):
            assign[u] = fresh
    return Partition.from_assign(assign)


@dataclass(frozen=True)
class CutBranch:
    """Affine condition over slots: z @ zcoef + const >= rhs."""

    zcoef: tuple[tuple[int, int], ...]
    const: int
    rhs: int

    def satisfied_at(self, zvec: Sequence[int]) -> bool:
        return self.const + sum(c * zvec[s] for s, c in self.zcoef) >= self.rhs


@dataclass(frozen=True)
class DisjunctiveCut:
    """Either-or condition every feasible edge choice must satisfy.

    Derived from comparing the ground truth against the single-node swap
    moving v from cluster_a to cluster_b: feasibility forces either enough
    edges from v into its own cluster (branch a) or the other cluster's
    attachment to dominate (branch b). Encoded with one indicator binary.
    """

    v: int
    cluster_a: frozenset[int]
    cluster_b: frozenset[int]
    branch_a: CutBranch
    branch_b: CutBranch

    def satisfied_at(self, zvec: Sequence[int]) -> bool:
        return self.branch_a.satisfied_at(zvec) or self.branch_b.satisfied_at(zvec)


def _affine_between(
    g: Graph, slots: list[tuple[int, int]], left: set[int], right: set[int]
) -> tuple[dict[int, int], int]:
    """Total weight between two disjoint node sets as (zcoef, const)."""
    const = 0
    for i in left:
        for j in right:
            const += int(g.adj[i, j])
    zc: dict[int, int] = {}
    for s, (i, j) in enumerate(slots):
        if (i in left and j in right) or (j in left and i in right):
            zc[s] = zc.get(s, 0) + 1
    return zc, const


def _affine_within(
    g: Graph, slots: list[tuple[int, int]], nodes: set[int]
) -> tuple[dict[int, int], int]:
    const = 0
    members = sorted(nodes)
    for a_idx, i in enumerate(members):
        for j in members[a_idx + 1 :]:
            const += int(g.adj[i, j])
    zc: dict[int, int] = {}
    for s, (i, j) in enumerate(slots):
        if i in nodes and j in nodes:
            zc[s] = zc.get(s, 0) + 1
    return zc, const


def _combine(parts: list[tuple[dict[int, int], int, int]]) -> tuple[dict[int, int], int]:
    """Weighted sum of (zcoef, const) pairs given as (zc, const, factor)."""
    zc: dict[int, int] = {}
    const = 0
    for part_zc, part_const, f in parts:
        const += f * part_const
        for s, c in part_zc.items():
            zc[s] = zc.get(s, 0) + f * c
    return {s: c for s, c in zc.items() if c != 0}, const


def _move_target(t: Partition, p_prime: Partition, v: int) -> Optional[int]:
    """If p_prime equals t with node v moved to another t-cluster, return
    that cluster's id in t; otherwise None."""
    t = canonicalize(t)
    p_prime = canonicalize(p_prime)
    for cid in range(t.k):
        if cid == t.assign[v]:
            continue
        assign = list(t.assign)
        assign[v] = cid
        if Partition.from_assign(assign) == p_prime:
            return cid
    return None


def build_disjunctive_cuts(
    g: Graph, t: Partition, p_prime: Partition, v: int, cand: CandidateEdgeSet
) -> tuple[DisjunctiveCut, ...]:
    """The paired disjunctions for a single-node swap at v.

    Quantities are affine in the slots over the base graph. The first
    disjunction (strict edge branch) is only emitted when v's degree is
    guaranteed positive: at degree zero the swap ties instead of winning,
    and a tie does not violate optimality of the ground truth.
    """
    t = canonicalize(t)
    target = _move_target(t, p_prime, v)
    if target is None:
        raise ValueError("p_prime must be t with exactly node v moved between clusters")
    slots = cand.slot_pairs()

    c1 = {u for u in range(t.n) if t.assign[u] == t.assign[v] and u != v}
    c2 = {u for u in range(t.n) if t.assign[u] == target}
    rest = {u for u in range(t.n) if u != v and u not in c1 and u not in c2}

    e1 = _affine_between(g, slots, {v}, c1)
    e2 = _affine_between(g, slots, {v}, c2)
    in1 = _affine_within(g, slots, c1)
    in2 = _affine_within(g, slots, c2)
    out1 = _affine_between(g, slots, c1, rest)
    out2 = _affine_between(g, slots, c2, rest)

    # e1 - e2 >= delta   |   2 E(C2) + E(C2, rest) - 2 E(C1) - E(C1, rest) >= delta
    edge_zc, edge_const = _combine([(e1[0], e1[1], 1), (e2[0], e2[1], -1)])
    dom_zc, dom_const = _combine(
        [(in2[0], in2[1], 2), (out2[0], out2[1], 1), (in1[0], in1[1], -2), (out1[0], out1[1], -1)]
    )
    edge = lambda rhs: CutBranch(tuple(sorted(edge_zc.items())), edge_const, rhs)
    dom = lambda rhs: CutBranch(tuple(sorted(dom_zc.items())), dom_const, rhs)

    cuts = []
    if int(g.degrees[v]) >= 1:
        cuts.append(
            DisjunctiveCut(v, frozenset(c1), frozenset(c2), edge(1), dom(0))
        )
    cuts.append(DisjunctiveCut(v, frozenset(c1), frozenset(c2), edge(0), dom(1)))
    return tuple(cuts)


def assemble_master(
    g: Graph,
    t: Partition,
    partitions: Iterable[Partition],
    cuts: Iterable[DisjunctiveCut],
    cand: CandidateEdgeSet,
    floor: int = 0,
    extra_rows: Iterable[CutBranch] = (),
    strict: bool = False,
) -> BinaryProgram:
    """Lower partition rows, disjunctive cuts and the floor into a program.

    Variables: one binary per candidate slot (objective 1), one indicator
    per cut (objective 0), and product variables (objective 0) materialized
    only where a row actually references them. With ``strict`` the partition
    rows require a margin of one scaled unit, making T uniquely optimal.
    """
    t = canonicalize(t)
    cuts = list(cuts)
    nslots = cand.num_slots
    ncuts = len(cuts)
    w_ids: dict[tuple[int, int], int] = {}
    next_id = nslots + ncuts

    def w_id(key: tuple[int, int]) -> int:
        nonlocal next_id
        if key not in w_ids:
            w_ids[key] = next_id
            next_id += 1
        return w_ids[key]

    rows: list[LinearRow] = []
    for p in partitions:
        p = canonicalize(p)
        if p == t:
            raise ValueError("pool partition equals the ground truth")
        prow = build_partition_row(g, t, p, cand)
        coeffs = [(s, c) for s, c in sorted(prow.zcoef.items())]
        coeffs += [(w_id(k), c) for k, c in sorted(prow.wcoef.items())]
        rhs = (1 if strict else 0) - prow.const
        rows.append(LinearRow(tuple(coeffs), rhs))

    big_m = 2 * (g.m + cand.total_capacity())
    for ci, cut in enumerate(cuts):
        y = nslots + ci
        a, b = cut.branch_a, cut.branch_b
        rows.append(LinearRow(tuple(a.zcoef) + ((y, big_m),), a.rhs - a.const))
        rows.append(LinearRow(tuple(b.zcoef) + ((y, -big_m),), b.rhs - b.const - big_m))

    for extra in extra_rows:
        rows.append(LinearRow(tuple(extra.zcoef), extra.rhs - extra.const))

    num_vars = next_id
    objective = tuple([1] * nslots + [0] * ncuts + [0] * len(w_ids))
    couplings = [Coupling(wid, a, b) for (a, b), wid in w_ids.items()]
    return BinaryProgram(num_vars, objective, rows, couplings, objective_floor=floor)
