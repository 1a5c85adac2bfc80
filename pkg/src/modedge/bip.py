"""Exact minimization over binary variables with sparse >= rows.

Small, dependency-free and deterministic. The search is iterative deepening
on the objective value starting at the program's floor: each level fixes the
objective sum and runs depth-first search with row-slack propagation.
Product (McCormick) variables never branch; each coupling w = z * z' is
substituted during propagation, so only plain binaries appear in the tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

__all__ = [
    "LinearRow",
    "Coupling",
    "BinaryProgram",
    "SolveOutcome",
    "solve_min",
    "NodeLimitExceeded",
]


@dataclass(frozen=True)
class LinearRow:
    """Sparse integer row: sum(coef * var) >= rhs."""

    coeffs: tuple[tuple[int, int], ...]  # (variable id, coefficient)
    rhs: int

    def eval_lhs(self, values) -> int:
        return sum(c * values[v] for v, c in self.coeffs)


@dataclass(frozen=True)
class Coupling:
    """Declares w = z1 * z2 for binary z1 != z2."""

    w: int
    z1: int
    z2: int


@dataclass
class BinaryProgram:
    num_vars: int
    objective: tuple[int, ...]
    rows: list[LinearRow] = field(default_factory=list)
    couplings: list[Coupling] = field(default_factory=list)
    objective_floor: int = 0

    def __post_init__(self):
        if len(self.objective) != self.num_vars:
            raise ValueError("objective length must equal num_vars")
        if any(c < 0 for c in self.objective):
            raise ValueError("objective coefficients must be nonnegative")
        seen_w = set()
        for cp in self.couplings:
            if cp.w in seen_w:
                raise ValueError(f"variable {cp.w} coupled twice")
            seen_w.add(cp.w)
            if cp.z1 == cp.z2:
                raise ValueError("self-products belong on the z variable itself")
            if self.objective[cp.w] != 0:
                raise ValueError("coupled product variables must have zero objective")
        for row in self.rows:
            for v, _ in row.coeffs:
                if not 0 <= v < self.num_vars:
                    raise ValueError(f"row references unknown variable {v}")

    def max_objective(self) -> int:
        return sum(self.objective)


@dataclass(frozen=True)
class SolveOutcome:
    status: str  # "optimal" | "infeasible" | "limit"
    assignment: Optional[tuple[int, ...]]
    objective_value: Optional[int]
    nodes_explored: int
    bound: Optional[int] = None  # proven lower bound when status == "limit"


class NodeLimitExceeded(Exception):
    pass


class _Search:
    def __init__(self, bp: BinaryProgram, node_limit: Optional[int]):
        self.bp = bp
        self.node_limit = node_limit
        self.nodes = 0
        self.w_of = {cp.w: (cp.z1, cp.z2) for cp in bp.couplings}
        self.decision = [v for v in range(bp.num_vars) if v not in self.w_of]
        self.obj = bp.objective
        # objective weight still assignable from decision var index d onward
        self.tail_obj = [0] * (len(self.decision) + 1)
        for d in range(len(self.decision) - 1, -1, -1):
            self.tail_obj[d] = self.tail_obj[d + 1] + self.obj[self.decision[d]]

    def _row_max_lhs(self, row: LinearRow, val: list[int]) -> int:
        total = 0
        for v, c in row.coeffs:
            pair = self.w_of.get(v)
            if pair is None:
                x = val[v]
                total += c * x if x >= 0 else max(c, 0)
            else:
                a, b = val[pair[0]], val[pair[1]]
                if a == 0 or b == 0:
                    continue
                if a == 1 and b == 1:
                    total += c
                else:
                    total += max(c, 0)
        return total

    def _feasible_here(self, val: list[int]) -> bool:
        return all(self._row_max_lhs(row, val) >= row.rhs for row in self.bp.rows)

    def _dfs(self, d: int, val: list[int], cur: int, level: int) -> Optional[list[int]]:
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise NodeLimitExceeded
        if cur > level or cur + self.tail_obj[d] < level:
            return None
        if not self._feasible_here(val):
            return None
        if d == len(self.decision):
            return val[:] if cur == level else None
        v = self.decision[d]
        for x in (1, 0):
            val[v] = x
            hit = self._dfs(d + 1, val, cur + self.obj[v] * x, level)
            if hit is not None:
                val[v] = -1
                return hit
            val[v] = -1
        return None

    def run(self) -> SolveOutcome:
        level = self.bp.objective_floor
        top = self.bp.max_objective()
        while level <= top:
            val = [-1] * self.bp.num_vars
            try:
                hit = self._dfs(0, val, 0, level)
            except NodeLimitExceeded:
                return SolveOutcome("limit", None, None, self.nodes, bound=level)
            if hit is not None:
                for w, (a, b) in self.w_of.items():
                    hit[w] = hit[a] * hit[b]
                return SolveOutcome("optimal", tuple(hit), level, self.nodes)
            level += 1
        return SolveOutcome("infeasible", None, None, self.nodes)


def solve_min(bp: BinaryProgram, node_limit: Optional[int] = None) -> SolveOutcome:
    """Globally minimize the objective; deterministic.

    Branch order is variable index ascending with value 1 tried first, so
    among optima the one whose assignment has the lexicographically largest
    prefix of ones at the optimal cardinality is returned, matching the
    documented tie-break.
    """
    return _Search(bp, node_limit).run()
