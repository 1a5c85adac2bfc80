"""Matching ground-truth clusters to competitor clusters.

Clusters of two partitions are paired by maximum-weight bipartite matching
on overlap counts; nodes whose cluster pair is not matched are the
misclassified set the cut and heuristic machinery works from.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .graph import Partition

__all__ = ["ClusterMatching", "match_clusters", "misclassified"]


@dataclass(frozen=True)
class ClusterMatching:
    """Max-weight pairing between clusters of t and clusters of p.

    ``pairs`` holds (t_cluster, p_cluster) with positive overlap, sorted;
    ``weight`` is the total overlap, maximal over all matchings.
    """

    pairs: tuple[tuple[int, int], ...]
    unmatched_t: tuple[int, ...]
    unmatched_p: tuple[int, ...]
    weight: int


def _overlap_matrix(t: Partition, p: Partition) -> np.ndarray:
    overlap = np.zeros((t.k, p.k), dtype=np.int64)
    for v in range(t.n):
        overlap[t.assign[v], p.assign[v]] += 1
    return overlap


def _max_weight(overlap: np.ndarray) -> int:
    rows, cols = linear_sum_assignment(overlap, maximize=True)
    return int(overlap[rows, cols].sum())


def match_clusters(t: Partition, p: Partition) -> ClusterMatching:
    """Maximum-weight cluster matching with a deterministic tie-break.

    Among maximum-weight matchings the lexicographically smallest pair list
    is returned: t-clusters are fixed in ascending order, each to the
    smallest p-cluster that still allows a completion of maximal weight.
    Zero-overlap pairs are never matched (they carry no information).
    """
    if t.n != p.n:
        raise ValueError("partitions cover different node counts")
    overlap = _overlap_matrix(t, p)
    target = _max_weight(overlap)

    pairs: list[tuple[int, int]] = []
    work = overlap.copy()
    fixed = 0
    for i in range(t.k):
        for j in range(p.k):
            if work[i, j] <= 0:
                continue
            trial = work.copy()
            w_ij = int(trial[i, j])
            trial[i, :] = 0
            trial[:, j] = 0
            if fixed + w_ij + _max_weight(trial) == target:
                pairs.append((i, j))
                fixed += w_ij
                work[i, :] = 0
                work[:, j] = 0
                break
    matched_t = {i for i, _ in pairs}
    matched_p = {j for _, j in pairs}
    return ClusterMatching(
        pairs=tuple(pairs),
        unmatched_t=tuple(i for i in range(t.k) if i not in matched_t),
        unmatched_p=tuple(j for j in range(p.k) if j not in matched_p),
        weight=fixed,
    )


def misclassified(t: Partition, p: Partition, mm: ClusterMatching) -> set[int]:
    """Nodes whose (t-cluster, p-cluster) pair is not in the matching.

    Covers nodes of unmatched clusters on either side automatically, e.g.
    when two ground-truth clusters merge in p the smaller one is unmatched
    and all of its nodes count as misclassified.
    """
    matched = set(mm.pairs)
    return {v for v in range(t.n) if (t.assign[v], p.assign[v]) not in matched}
