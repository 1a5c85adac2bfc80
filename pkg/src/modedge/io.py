"""File formats, candidate generation and report rendering.

External node labels are kept at this boundary; everything inside the
package works on dense 0-based ids. Sampling uses PCG64 so candidate sets
replicate across platforms for a given seed.
"""

from __future__ import annotations

import csv
import io as _io
import json
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .graph import Graph, Partition, EdgeDelta, graph_from_edges, distance2_pairs
from .master import CandidateEdgeSet

__all__ = [
    "DataError",
    "parse_pajek",
    "parse_edge_csv",
    "parse_partition_csv",
    "generate_candidates",
    "largest_component",
    "render_fraction",
    "delta_csv",
    "report_json",
]

RNG_NAME = "PCG64"


class DataError(ValueError):
    """Malformed input file."""


def parse_pajek(text: str) -> tuple[Graph, list[str]]:
    """Parse a Pajek .net file: *Vertices then *Edges/*Arcs, 1-based ids.

    Arcs are symmetrized by adding their weight in both directions (a pair
    of opposite arcs yields weight 2). Weights must be integral to 1e-6.
    """
    n: Optional[int] = None
    labels: list[str] = []
    edges: list[tuple[int, int, int]] = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        low = line.lower()
        if low.startswith("*vertices"):
            parts = line.split()
            if len(parts) < 2 or not parts[1].isdigit():
                raise DataError(f"line {lineno}: malformed *Vertices header")
            n = int(parts[1])
            labels = [str(i + 1) for i in range(n)]
            section = "vertices"
            continue
        if low.startswith("*edges") or low.startswith("*arcs"):
            if n is None:
                raise DataError(f"line {lineno}: edge section before *Vertices")
            section = "edges"
            continue
        if line.startswith("*"):
            section = "other"
            continue
        if section == "vertices":
            parts = line.split(None, 1)
            idx = int(parts[0])
            if not 1 <= idx <= n:
                raise DataError(f"line {lineno}: vertex id {idx} out of range")
            if len(parts) > 1:
                labels[idx - 1] = parts[1].strip().strip('"')
            continue
        if section == "edges":
            parts = line.split()
            if len(parts) < 2:
                raise DataError(f"line {lineno}: need at least two fields")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise DataError(f"line {lineno}: bad endpoint: {exc}") from None
            w = 1.0 if len(parts) == 2 else float(parts[2])
            wi = round(w)
            if abs(w - wi) > 1e-6:
                raise DataError(f"line {lineno}: non-integral weight {w}")
            if wi < 1:
                raise DataError(f"line {lineno}: weight {wi} < 1")
            if i == j:
                raise DataError(f"line {lineno}: self-loop on vertex {i}")
            if n is None or not (1 <= i <= n and 1 <= j <= n):
                raise DataError(f"line {lineno}: endpoint out of range")
            edges.append((i - 1, j - 1, int(wi)))
    if n is None:
        raise DataError("missing *Vertices section")
    norm = [(min(i, j), max(i, j), w) for i, j, w in edges]
    return graph_from_edges(n, norm), labels


def parse_edge_csv(text: str) -> tuple[Graph, list[str]]:
    """Edge list rows "u,v[,w]" with arbitrary string labels."""
    ids: dict[str, int] = {}
    rows: list[tuple[int, int, int]] = []
    for lineno, row in enumerate(csv.reader(_io.StringIO(text)), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) not in (2, 3):
            raise DataError(f"line {lineno}: expected 2 or 3 fields, got {len(row)}")
        u, v = row[0].strip(), row[1].strip()
        if u == v:
            raise DataError(f"line {lineno}: self-loop on {u!r}")
        w = 1
        if len(row) == 3:
            try:
                w = int(row[2])
            except ValueError:
                raise DataError(f"line {lineno}: bad weight {row[2]!r}") from None
            if w < 1:
                raise DataError(f"line {lineno}: weight {w} < 1")
        for name in (u, v):
            if name not in ids:
                ids[name] = len(ids)
        rows.append((ids[u], ids[v], w))
    if not rows:
        raise DataError("no edges in input")
    labels = [None] * len(ids)
    for name, i in ids.items():
        labels[i] = name
    norm = [(min(i, j), max(i, j), w) for i, j, w in rows]
    return graph_from_edges(len(ids), norm), labels


def parse_partition_csv(text: str, labels: Sequence[str]) -> Partition:
    """Rows "node,cluster"; every node must appear exactly once."""
    index = {name: i for i, name in enumerate(labels)}
    assign: list[Optional[str]] = [None] * len(labels)
    for lineno, row in enumerate(csv.reader(_io.StringIO(text)), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise DataError(f"line {lineno}: expected 'node,cluster'")
        name, cluster = row[0].strip(), row[1].strip()
        if name not in index:
            raise DataError(f"line {lineno}: unknown node {name!r}")
        if assign[index[name]] is not None:
            raise DataError(f"line {lineno}: duplicate row for node {name!r}")
        assign[index[name]] = cluster
    missing = [labels[i] for i, a in enumerate(assign) if a is None]
    if missing:
        raise DataError(f"partition misses nodes: {missing[:5]}")
    return Partition.from_assign(assign)


def generate_candidates(
    g: Graph,
    t: Partition,
    seed_delta: EdgeDelta,
    budget: int,
    seed: int = 0,
) -> CandidateEdgeSet:
    """Seed pairs first, then a seeded sample of distance-2 pairs.

    The budget counts seed pairs plus sampled pairs together. Deterministic
    for a given seed (PCG64).
    """
    seed_pairs = [(i, j) for i, j, _ in seed_delta.pairs]
    if budget < len(seed_pairs):
        raise ValueError(
            f"budget {budget} below the {len(seed_pairs)} seed pairs"
        )
    pool = [p for p in distance2_pairs(g) if p not in set(seed_pairs)]
    rng = np.random.Generator(np.random.PCG64(seed))
    take = min(budget - len(seed_pairs), len(pool))
    picked: list[tuple[int, int]] = seed_pairs[:]
    if take:
        idx = rng.choice(len(pool), size=take, replace=False)
        picked += [pool[int(k)] for k in sorted(idx)]
    return CandidateEdgeSet(tuple(picked), (1,) * len(picked))


def largest_component(g: Graph) -> tuple[Graph, list[int]]:
    """Restrict to the largest connected component; returns (graph, kept ids)."""
    seen = [False] * g.n
    best: list[int] = []
    for start in range(g.n):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        queue = [start]
        while queue:
            u = queue.pop()
            for v in g.neighbors(u):
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    queue.append(v)
        if len(comp) > len(best):
            best = comp
    best.sort()
    remap = {old: new for new, old in enumerate(best)}
    edges = [
        (remap[i], remap[j], w) for i, j, w in g.edges() if i in remap and j in remap
    ]
    return graph_from_edges(len(best), edges), best


def render_fraction(q: Optional[Fraction]) -> Optional[dict]:
    if q is None:
        return None
    return {"rational": f"{q.numerator}/{q.denominator}", "float": float(q)}


def delta_csv(delta: EdgeDelta, labels: Sequence[str]) -> str:
    out = _io.StringIO()
    w = csv.writer(out)
    w.writerow(["u", "v", "delta_weight"])
    for i, j, dw in delta.pairs:
        w.writerow([labels[i], labels[j], dw])
    return out.getvalue()


def report_json(payload: dict) -> str:
    def default(obj):
        if isinstance(obj, Fraction):
            return render_fraction(obj)
        if isinstance(obj, Partition):
            return list(obj.assign)
        if isinstance(obj, EdgeDelta):
            return [list(p) for p in obj.pairs]
        if isinstance(obj, (np.integer,)):
            return int(obj)
        raise TypeError(f"cannot serialize {type(obj)!r}")

    return json.dumps(payload, indent=2, default=default)
