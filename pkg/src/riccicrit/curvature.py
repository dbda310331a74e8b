"""Exact Ollivier-Ricci curvature of graph edges via optimal transport.

For an edge {u, v} the curvature is 1 - EMD/dist(u, v), where EMD is the
earth mover's distance between the uniform distributions on the two closed
neighborhoods under the shortest-path metric. Two independent routes compute
the same exact rational:

* the matching route replicates the r x s neighborhood cost matrix into a
  q x q matrix (q = lcm(r, s)) whose minimum-cost perfect matchings have cost
  exactly q * EMD, and
* the flow route solves the transportation LP directly as an integer
  min-cost-flow after scaling both marginals by q.

The matching route is the default because downstream solvers consume the
matching witness; the flow route stays as the independent oracle and also
avoids building the blown-up matrix when q is huge.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import networkx as nx

from .errors import BlowUpTooLargeError, DisconnectedNeighborhoodError
from .graphs import Graph, ordered_pair
from .matching import Matching, matching_cost, min_cost_perfect_matching

DEFAULT_BLOWUP_CAP = 10_000
BLOWUP_CAP_ENV = "RICCI_BLOWUP_CAP"


class Sign(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    ZERO = "zero"


def sign_of(value: Fraction) -> Sign:
    if value > 0:
        return Sign.POSITIVE
    if value < 0:
        return Sign.NEGATIVE
    return Sign.ZERO


def fraction_json(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


@dataclass(frozen=True)
class NeighborhoodPair:
    """The two closed neighborhoods of an edge, low-degree endpoint first."""

    u: int
    v: int
    vu: tuple[int, ...]
    vv: tuple[int, ...]

    @property
    def r(self) -> int:
        return len(self.vu)

    @property
    def s(self) -> int:
        return len(self.vv)

    @property
    def mass_u(self) -> Fraction:
        return Fraction(1, self.r)

    @property
    def mass_v(self) -> Fraction:
        return Fraction(1, self.s)


@dataclass(frozen=True)
class CostMatrix:
    """Complete bipartite cost matrix between the two closed neighborhoods.

    ``costs[i][j]`` is the exact shortest-path distance between row node i
    and column node j. An entry is touchable when neither of its endpoints is
    u or v; only touchable entries can be lowered by a restricted edge
    insertion.
    """

    u: int
    v: int
    row_nodes: tuple[int, ...]
    col_nodes: tuple[int, ...]
    costs: tuple[tuple[int, ...], ...]
    touchable: tuple[tuple[bool, ...], ...]

    @property
    def r(self) -> int:
        return len(self.row_nodes)

    @property
    def s(self) -> int:
        return len(self.col_nodes)

    def mirror_pairs(self) -> tuple[tuple[int, int], ...]:
        """(row index, column index) pairs that name the same graph node:
        u, v, and every common neighbor."""
        col_of = {node: j for j, node in enumerate(self.col_nodes)}
        out = []
        for i, node in enumerate(self.row_nodes):
            j = col_of.get(node)
            if j is not None:
                out.append((i, j))
        return tuple(out)


@dataclass(frozen=True)
class BlowUpMatrix:
    """q x q replication of a CostMatrix, q = lcm(r, s).

    Row copies of row node i occupy rows i*a..(i+1)*a-1 and column copies of
    column node j occupy cols j*b..(j+1)*b-1; every cell of a block carries
    the source entry's cost.
    """

    source: CostMatrix
    q: int
    a: int
    b: int
    costs: tuple[tuple[int, ...], ...]

    def block(self, row: int, col: int) -> tuple[int, int]:
        return (row // self.a, col // self.b)

    def block_cost(self, i: int, j: int) -> int:
        return self.source.costs[i][j]

    def touchable(self, row: int, col: int) -> bool:
        i, j = self.block(row, col)
        return self.source.touchable[i][j]

    def touchable_mask(self) -> tuple[tuple[bool, ...], ...]:
        return tuple(
            tuple(self.touchable(row, col) for col in range(self.q)) for row in range(self.q)
        )


@dataclass(frozen=True)
class TransportPlan:
    """Rational flow between the two neighborhood distributions."""

    entries: tuple[tuple[int, int, Fraction], ...]  # (from node, to node, mass)
    total_cost: Fraction

    def mass(self, x: int, y: int) -> Fraction:
        for a, b, m in self.entries:
            if a == x and b == y:
                return m
        return Fraction(0)

    def to_json_list(self) -> list[dict]:
        return [
            {"from": a, "to": b, "mass": fraction_json(m)}
            for a, b, m in self.entries
        ]


@dataclass(frozen=True)
class CurvatureResult:
    emd: Fraction
    dist_uv: int
    ric: Fraction
    sign: Sign
    witness: TransportPlan

    def to_json_dict(self, *, include_plan: bool = True) -> dict:
        out = {
            "emd": fraction_json(self.emd),
            "emd_str": f"{self.emd.numerator}/{self.emd.denominator}",
            "dist_uv": self.dist_uv,
            "ric": fraction_json(self.ric),
            "ric_str": f"{self.ric.numerator}/{self.ric.denominator}",
            "sign": self.sign.value,
        }
        if include_plan:
            out["plan"] = self.witness.to_json_list()
        return out


def build_cost_matrix(g: Graph, e: tuple[int, int]) -> tuple[NeighborhoodPair, CostMatrix]:
    """Neighborhood pair and exact distance matrix for an existing edge.

    The lower-degree endpoint supplies the rows (ties broken toward the
    smaller node id). Any unreachable row/column pair makes the curvature
    undefined and raises DisconnectedNeighborhoodError.
    """
    a, b = e
    if not g.has_edge(a, b):
        raise ValueError(f"({a}, {b}) is not an edge")
    if (g.degree(a), a) <= (g.degree(b), b):
        u, v = a, b
    else:
        u, v = b, a
    vu = g.closed_neighborhood(u)
    vv = g.closed_neighborhood(v)
    rows = []
    for x in vu:
        dist_row = g.distances_from(x)
        row = []
        for y in vv:
            d = dist_row[y]
            if d == math.inf:
                raise DisconnectedNeighborhoodError(
                    f"nodes {x} and {y} are disconnected; curvature undefined for edge ({u}, {v})"
                )
            row.append(int(d))
        rows.append(tuple(row))
    ends = {u, v}
    touchable = tuple(
        tuple(x not in ends and y not in ends for y in vv) for x in vu
    )
    pair = NeighborhoodPair(u, v, vu, vv)
    cm = CostMatrix(u, v, vu, vv, tuple(rows), touchable)
    return pair, cm


def blowup_cap(explicit: int | None = None) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get(BLOWUP_CAP_ENV)
    if env:
        return int(env)
    return DEFAULT_BLOWUP_CAP


def blow_up(cm: CostMatrix, *, cap: int | None = None) -> BlowUpMatrix:
    """Replicate the cost matrix to a q x q matrix, q = lcm(r, s)."""
    r, s = cm.r, cm.s
    q = math.lcm(r, s)
    limit = blowup_cap(cap)
    if q > limit:
        raise BlowUpTooLargeError(f"blow-up size q={q} exceeds cap {limit}")
    a, b = q // r, q // s
    costs = tuple(
        tuple(cm.costs[row // a][col // b] for col in range(q)) for row in range(q)
    )
    return BlowUpMatrix(cm, q, a, b, costs)


def emd_via_matching(bm: BlowUpMatrix) -> tuple[Fraction, Matching]:
    """EMD as mcpm(blow-up)/q, with the witnessing min-cost perfect matching."""
    m = min_cost_perfect_matching(bm.costs)
    return Fraction(m.cost, bm.q), m


def emd_via_flow(cm: CostMatrix) -> tuple[Fraction, TransportPlan]:
    """EMD by integer min-cost flow on the r x s transportation problem.

    Scaling both marginals by q = lcm(r, s) gives integer supplies a per row
    and demands b per column; network simplex then returns an integral
    optimal flow whose cost divided by q is the exact EMD.
    """
    r, s = cm.r, cm.s
    q = math.lcm(r, s)
    a, b = q // r, q // s
    g = nx.DiGraph()
    for i in range(r):
        g.add_node(("r", i), demand=-a)
    for j in range(s):
        g.add_node(("c", j), demand=b)
    for i in range(r):
        for j in range(s):
            g.add_edge(("r", i), ("c", j), weight=cm.costs[i][j], capacity=b)
    flow = nx.min_cost_flow(g)
    entries = []
    total = 0
    for i in range(r):
        for j in range(s):
            f = flow[("r", i)][("c", j)]
            if f:
                entries.append((cm.row_nodes[i], cm.col_nodes[j], Fraction(f, q)))
                total += cm.costs[i][j] * f
    return Fraction(total, q), TransportPlan(tuple(entries), Fraction(total, q))


def plan_from_matching(bm: BlowUpMatrix, m: Matching) -> TransportPlan:
    """Aggregate a perfect matching of the blow-up into a transport plan.

    Each matched copy pair ships mass 1/q between its block's nodes, so the
    plan costs cost(m)/q and meets the row-sum 1/r and column-sum 1/s
    constraints exactly.
    """
    if len(m.assignment) != bm.q:
        raise ValueError("matching size does not match the blow-up")
    cell_count: dict[tuple[int, int], int] = {}
    for row, col in enumerate(m.assignment):
        key = bm.block(row, col)
        cell_count[key] = cell_count.get(key, 0) + 1
    entries = []
    total = 0
    for (i, j), cnt in sorted(cell_count.items()):
        entries.append((bm.source.row_nodes[i], bm.source.col_nodes[j], Fraction(cnt, bm.q)))
        total += bm.block_cost(i, j) * cnt
    if total != m.cost:
        raise ValueError("matching cost does not match the blow-up costs")
    return TransportPlan(tuple(entries), Fraction(total, bm.q))


def canonicalize_matching(
    bm: BlowUpMatrix,
    m: Matching,
    mirrors: Iterable[tuple[int, int]] | None = None,
) -> Matching:
    """Rearrange a min-cost matching so every mirrored node feeds itself.

    For each (row index, column index) pair naming the same graph node (u, v,
    and each common neighbor), the result matches all b column copies to row
    copies of the same node at zero cost. Each exchange swaps two matched
    edges for two others of no greater total weight (the metric triangle
    through the mirrored node), so the cost is preserved exactly for min-cost
    input; non-optimal input is rejected.
    """
    if mirrors is None:
        mirrors = bm.source.mirror_pairs()
    optimal = min_cost_perfect_matching(bm.costs, lex_tiebreak=False)
    if m.cost != optimal.cost or matching_cost(bm.costs, m.assignment) != m.cost:
        raise ValueError("canonicalization requires a minimum-cost perfect matching")
    assignment = list(m.assignment)
    col_to_row = {c: r for r, c in enumerate(assignment)}
    a, b = bm.a, bm.b
    for i, j in mirrors:
        row_copies = set(range(i * a, (i + 1) * a))
        for col in range(j * b, (j + 1) * b):
            r0 = col_to_row[col]
            if r0 in row_copies:
                continue
            # Some copy of the mirrored node is matched outside its own
            # column group; swap partners with it.
            src = next(r for r in sorted(row_copies) if assignment[r] not in range(j * b, (j + 1) * b))
            other_col = assignment[src]
            assignment[src] = col
            assignment[r0] = other_col
            col_to_row[col] = src
            col_to_row[other_col] = r0
    new_cost = matching_cost(bm.costs, assignment)
    if new_cost != m.cost:
        raise AssertionError("canonicalization changed the matching cost")
    return Matching(tuple(assignment), new_cost)


def ricci(
    g: Graph,
    e: tuple[int, int],
    *,
    route: str = "matching",
    cap: int | None = None,
) -> CurvatureResult:
    """Exact Ollivier-Ricci curvature of an edge.

    The unweighted formula 1 - EMD is the weighted one with dist(u, v) = 1,
    so both cases share 1 - EMD/dist(u, v). The sign is reported as a
    three-valued enum; callers that need a strict inequality must demand it
    themselves.
    """
    pair, cm = build_cost_matrix(g, e)
    dist_uv = g.shortest_dist(pair.u, pair.v)
    if route == "matching":
        bm = blow_up(cm, cap=cap)
        emd, m = emd_via_matching(bm)
        witness = plan_from_matching(bm, m)
    elif route == "flow":
        emd, witness = emd_via_flow(cm)
    else:
        raise ValueError(f"unknown route {route!r}")
    ric = 1 - emd / int(dist_uv)
    return CurvatureResult(emd, int(dist_uv), ric, sign_of(ric), witness)


def edge_ref(u: int, v: int) -> tuple[int, int]:
    if u == v:
        raise ValueError("an edge needs two distinct endpoints")
    return ordered_pair(u, v)
