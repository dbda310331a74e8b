"""Critical-edge solvers: flip the curvature sign of an edge with few edits.

A problem variant picks weighted/unweighted input, restricted/unrestricted
candidate edits, insertion/deletion, and the demanded sign change. Exact
algorithms exist only where the underlying theory provides them:

* feasibility by saturation (apply every permissible edit, check the sign)
  for the studied insert-to-positive variants and restricted
  delete-to-negative;
* a deterministic greedy that lowers matched cost-matrix entries until the
  matched cost crosses the flip threshold (factor 2b under the no-side-edges
  property, 2(a+b) in general);
* a randomized sweep over matching signatures that picks the matching whose
  minimum drop count is smallest (factor b, respectively a+b), built on the
  exact-cost matching machinery;
* plain brute force over edit subsets as the acceptance oracle.

Every solver re-verifies its answer by recomputing the curvature on the
edited graph; an unverified edit set is never returned.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .curvature import (
    BlowUpMatrix,
    CostMatrix,
    CurvatureResult,
    Sign,
    blow_up,
    build_cost_matrix,
    canonicalize_matching,
    fraction_json,
    ricci,
)
from .errors import (
    BudgetExceededError,
    DisconnectedNeighborhoodError,
    InfeasibleInstanceError,
    RetryExhaustedError,
    UnsupportedVariantError,
)
from .graphs import Graph, ordered_pair
from .matching import (
    Matching,
    matching_cost,
    matching_with_counts,
    min_cost_perfect_matching,
    signature_support,
)

WEIGHTINGS = ("uw", "wt")
RESTRICTIONS = ("rt", "ut")
OPERATIONS = ("ins", "del")
DIRECTIONS = ("ptn", "ntp")

# For unweighted graphs a sign flip can only go negative-to-positive via
# insertions and positive-to-negative via deletions; the four opposite
# pairings are rejected outright.
INFEASIBLE_VARIANTS = frozenset(
    {
        ("uw", "rt", "ins", "ptn"),
        ("uw", "ut", "ins", "ptn"),
        ("uw", "rt", "del", "ntp"),
        ("uw", "ut", "del", "ntp"),
    }
)

# Variants whose saturation check is a sound and complete feasibility
# decider. Unrestricted deletion is excluded: deleting edges at u and v
# shrinks the neighborhoods themselves, so "delete everything" is not the
# extremal edit set there.
_SATURATION_VARIANTS = frozenset(
    {
        ("uw", "rt", "ins", "ntp"),
        ("uw", "ut", "ins", "ntp"),
        ("wt", "rt", "ins", "ntp"),
        ("wt", "ut", "ins", "ntp"),
        ("uw", "rt", "del", "ptn"),
    }
)

_APPROX_VARIANT = ("uw", "rt", "ins", "ntp")


@dataclass(frozen=True)
class ProblemVariant:
    weighting: str
    restriction: str
    operation: str
    direction: str

    def __post_init__(self):
        if (
            self.weighting not in WEIGHTINGS
            or self.restriction not in RESTRICTIONS
            or self.operation not in OPERATIONS
            or self.direction not in DIRECTIONS
        ):
            raise ValueError(f"unknown variant attribute in {self.key}")
        if self.key_tuple in INFEASIBLE_VARIANTS:
            raise ValueError(f"variant {self.key} has no feasible solutions")

    @property
    def key_tuple(self) -> tuple[str, str, str, str]:
        return (self.weighting, self.restriction, self.operation, self.direction)

    @property
    def key(self) -> str:
        return "-".join([self.weighting, self.restriction, self.operation, self.direction])

    @classmethod
    def parse(cls, name: str) -> "ProblemVariant":
        parts = name.strip().split("-")
        if len(parts) != 4:
            raise ValueError(f"variant must look like 'uw-rt-ins-ntp', got {name!r}")
        return cls(*parts)


@dataclass(frozen=True)
class Instance:
    """A graph, an edge of it, and the demanded sign flip."""

    graph: Graph
    edge: tuple[int, int]
    variant: ProblemVariant

    def __post_init__(self):
        u, v = self.edge
        object.__setattr__(self, "edge", ordered_pair(u, v))
        if not self.graph.has_edge(*self.edge):
            raise ValueError(f"{self.edge} is not an edge of the graph")
        if self.variant.weighting == "uw" and self.graph.weighted:
            raise ValueError("uw variants require an unweighted graph")
        base = ricci(self.graph, self.edge, route="flow")
        if self.variant.direction == "ntp":
            # Sign zero is admitted as the degenerate boundary case where a
            # single suitable edit already decides the instance.
            if base.sign == Sign.POSITIVE:
                raise ValueError("ntp instances need non-positive starting curvature")
        else:
            if base.sign != Sign.POSITIVE:
                raise ValueError("ptn instances need strictly positive starting curvature")

    def base_curvature(self) -> CurvatureResult:
        return ricci(self.graph, self.edge, route="flow")


@dataclass(frozen=True)
class Solution:
    """A verified edit set: applying it flips the sign as demanded."""

    edits: tuple
    resulting_ric: Fraction
    method: str
    drops: int | None = None

    def to_json_dict(self) -> dict:
        if not self.edits:
            edits_json: list = []
        elif isinstance(self.edits[0][0], tuple):
            edits_json = [{"edge": list(pair), "weight": w} for pair, w in self.edits]
        else:
            edits_json = [{"edge": list(pair)} for pair in self.edits]
        return {
            "edits": edits_json,
            "resulting_ric": fraction_json(self.resulting_ric),
            "resulting_ric_str": f"{self.resulting_ric.numerator}/{self.resulting_ric.denominator}",
            "method": self.method,
            "verified": True,
        }


@dataclass(frozen=True)
class KappaState:
    """Drop budget of a cost-x matching: how many matched 3-edges and
    touchable 2-edges must fall to 1 before the matched cost is below q."""

    x: int
    rho: int
    kappa3: int | None
    kappa2: int | None
    unwanted: bool
    selected_edges: tuple = ()

    @property
    def total(self) -> int | None:
        if self.unwanted:
            return None
        return self.kappa3 + self.kappa2


# -- edits ---------------------------------------------------------------------


def has_spade_property(g: Graph, e: tuple[int, int]) -> bool:
    """True when neither open neighborhood of the edge contains an edge."""
    u, v = e
    for side, other in ((u, v), (v, u)):
        nbrs = [x for x in g.neighbors(side) if x != other]
        for a, b in itertools.combinations(nbrs, 2):
            if g.has_edge(a, b):
                return False
    return True


def candidate_edits(g: Graph, edge: tuple[int, int], variant: ProblemVariant) -> tuple:
    """Candidate edits for an edge under a variant, in canonical sorted order.

    Insertions come as ((u, v), weight) with weight 1 (heavier insertions are
    never needed when the edge's own weight survives the edit), deletions as
    plain node pairs."""
    u, v = ordered_pair(*edge)
    if variant.operation == "ins":
        pairs: set[tuple[int, int]] = set()
        if variant.restriction == "rt":
            left = [x for x in g.neighbors(u) if x != v]
            right = [y for y in g.neighbors(v) if y != u]
            for x in left:
                for y in right:
                    if x != y and not g.has_edge(x, y):
                        pairs.add(ordered_pair(x, y))
        else:
            for x in range(g.node_count):
                for y in range(x + 1, g.node_count):
                    if not g.has_edge(x, y):
                        pairs.add((x, y))
        return tuple((pair, 1) for pair in sorted(pairs))
    else:
        out = []
        for a, b, _w in g.edges():
            if (a, b) == (u, v):
                continue
            if variant.restriction == "rt" and (a in (u, v) or b in (u, v)):
                continue
            out.append((a, b))
        return tuple(sorted(out))


def permissible_edits(inst: Instance) -> tuple:
    return candidate_edits(inst.graph, inst.edge, inst.variant)


def apply_edits(inst: Instance, edits: Iterable) -> Graph:
    edits = tuple(edits)
    if inst.variant.operation == "ins":
        return inst.graph.insert_edges(edits)
    return inst.graph.delete_edges(edits)


def _demanded_sign(inst: Instance) -> Sign:
    return Sign.POSITIVE if inst.variant.direction == "ntp" else Sign.NEGATIVE


def _flips(inst: Instance, edits: Iterable) -> tuple[bool, Fraction | None]:
    try:
        res = ricci(apply_edits(inst, edits), inst.edge, route="flow")
    except DisconnectedNeighborhoodError:
        return False, None
    return res.sign == _demanded_sign(inst), res.ric


def _check_saturation_variant(inst: Instance) -> None:
    key = inst.variant.key_tuple
    if key not in _SATURATION_VARIANTS:
        raise UnsupportedVariantError(f"no saturation decider for variant {inst.variant.key}")
    if inst.variant.weighting == "wt" and inst.variant.operation == "ins":
        w = inst.graph.weight(*inst.edge)
        limit = 3 if inst.variant.restriction == "rt" else 2
        if w > limit:
            raise UnsupportedVariantError(
                f"saturation for {inst.variant.key} is only guaranteed when w(u,v) <= {limit}, got {w}"
            )


def feasible_by_saturation(inst: Instance) -> tuple[bool, Solution | None]:
    """Apply every permissible edit at once and check the resulting sign.

    Sound and complete for the supported variants: the saturated graph is
    extremal, so it flips if anything does.
    """
    _check_saturation_variant(inst)
    edits = permissible_edits(inst)
    if not edits:
        return False, None
    flipped, ric_after = _flips(inst, edits)
    if not flipped:
        return False, None
    return True, Solution(edits, ric_after, "saturation")


def brute_force_opt(inst: Instance, max_k: int, *, budget: int = 2_000_000) -> Solution | None:
    """Smallest edit set that flips the sign, by exhaustive level search.

    Cardinality-lexicographic: levels are searched in increasing size and
    candidate subsets in lexicographic order, so the result is deterministic.
    Returns None when nothing within ``max_k`` edits flips. Exponential by
    design; refuses search spaces beyond ``budget`` subsets.
    """
    cands = permissible_edits(inst)
    spent = 0
    for k in range(1, max_k + 1):
        level = math.comb(len(cands), k)
        if spent + level > budget:
            raise BudgetExceededError(
                f"level {k} needs {level} subsets ({spent} already searched), over budget {budget}"
            )
        spent += level
        for combo in itertools.combinations(cands, k):
            flipped, ric_after = _flips(inst, combo)
            if flipped:
                return Solution(tuple(combo), ric_after, "brute")
    return None


# -- the kappa machinery --------------------------------------------------------


def kappa_hat(counts, x: int, mcpm: int, rho: int, q: int) -> KappaState:
    """Minimum drops for a cost-x matching to fall strictly below q.

    Matched 3-edges drop to 1 (saving 2 each) before touchable 2-edges
    (saving 1); a matching without enough droppable weight is "unwanted".
    ``counts`` needs attributes n3 and n2_touchable.
    """
    tau = rho + (x - mcpm)  # equals x - q
    n3 = counts.n3
    n2 = counts.n2_touchable
    if 2 * n3 > tau:
        kappa3 = tau // 2 + 1
        return KappaState(x, rho, kappa3, 0, False)
    if 2 * n3 + n2 > tau:
        kappa2 = tau - 2 * n3 + 1
        return KappaState(x, rho, n3, kappa2, False)
    return KappaState(x, rho, None, None, True)


def select_drop_edges(
    bm: BlowUpMatrix,
    m: Matching,
    state: KappaState,
) -> KappaState:
    """Attach the concrete matched edges realizing a KappaState's budget."""
    if state.unwanted:
        raise ValueError("unwanted matchings have no drop set")
    threes = []
    twos = []
    for row, col in enumerate(m.assignment):
        i, j = bm.block(row, col)
        c = bm.block_cost(i, j)
        if c == 3:
            threes.append((row, col))
        elif c == 2 and bm.source.touchable[i][j]:
            twos.append((row, col))
    if state.kappa2 == 0:
        chosen = threes[: state.kappa3]
    else:
        chosen = threes + twos[: state.kappa2]
    if len(chosen) != state.total:
        raise ValueError("matching cannot realize the requested drop budget")
    return KappaState(state.x, state.rho, state.kappa3, state.kappa2, False, tuple(chosen))


@dataclass(frozen=True)
class _Setup:
    pair_u: int
    pair_v: int
    cm: CostMatrix
    bm: BlowUpMatrix
    mcpm: Matching
    delta: int
    rho: int

    @property
    def q(self) -> int:
        return self.bm.q


def _setup(inst: Instance) -> _Setup:
    pair, cm = build_cost_matrix(inst.graph, inst.edge)
    bm = blow_up(cm)
    best = min_cost_perfect_matching(bm.costs)
    delta = best.cost
    return _Setup(pair.u, pair.v, cm, bm, best, delta, delta - bm.q)


def _require_approx_variant(inst: Instance) -> None:
    if inst.variant.key_tuple != _APPROX_VARIANT:
        raise UnsupportedVariantError(
            f"this solver only handles {'-'.join(_APPROX_VARIANT)}, not {inst.variant.key}"
        )


def _single_edit_solution(inst: Instance, method: str) -> Solution | None:
    for edit in permissible_edits(inst):
        flipped, ric_after = _flips(inst, [edit])
        if flipped:
            return Solution((edit,), ric_after, method, drops=1)
    return None


def _finish_insert_solution(inst: Instance, blocks: Iterable[tuple[int, int]], method: str, drops: int) -> Solution:
    cm = build_cost_matrix(inst.graph, inst.edge)[1]
    pairs = sorted({ordered_pair(cm.row_nodes[i], cm.col_nodes[j]) for i, j in blocks})
    edits = tuple((pair, 1) for pair in pairs)
    flipped, ric_after = _flips(inst, edits)
    if not flipped:
        raise RetryExhaustedError("constructed edit set failed verification; nothing returned")
    return Solution(edits, ric_after, method, drops=drops)


# -- weight propagation (restricted insertions, general neighborhoods) ----------


def weight_propagation(g: Graph, cm: CostMatrix, inserted: tuple[int, int]) -> CostMatrix:
    """Cost-matrix update for inserting the weight-1 edge ``inserted``.

    The direct entry falls to 1. The only other entries that can change are
    3-entries in the inserted column whose row neighbors the inserted row
    node, and 3-entries in the inserted row whose column neighbors the
    inserted column node; each falls to 2 (a two-step path through the new
    edge). ``g`` is the graph before this insertion, including all earlier
    insertions.
    """
    x, y = inserted
    try:
        i = cm.row_nodes.index(x)
        j = cm.col_nodes.index(y)
    except ValueError:
        raise ValueError(f"inserted pair {inserted} does not map to a cost-matrix cell") from None
    if not cm.touchable[i][j]:
        raise ValueError(f"entry for {inserted} is untouchable")
    costs = [list(row) for row in cm.costs]
    if costs[i][j] > 1:
        costs[i][j] = 1
    # Common neighbors sit on both sides, so the inserted pair may name a
    # second, transposed cell; rows/columns of common neighbors never hold
    # 3-entries, hence no further family updates are needed around it.
    if y in cm.row_nodes and x in cm.col_nodes:
        ti = cm.row_nodes.index(y)
        tj = cm.col_nodes.index(x)
        if costs[ti][tj] > 1:
            costs[ti][tj] = 1
    for i2, xn in enumerate(cm.row_nodes):
        if i2 != i and costs[i2][j] == 3 and g.has_edge(x, xn):
            costs[i2][j] = 2
    for j2, yn in enumerate(cm.col_nodes):
        if j2 != j and costs[i][j2] == 3 and g.has_edge(y, yn):
            costs[i][j2] = 2
    return CostMatrix(
        cm.u, cm.v, cm.row_nodes, cm.col_nodes, tuple(tuple(r) for r in costs), cm.touchable
    )


# -- greedy ----------------------------------------------------------------------


def greedy_schedule(
    costs,
    touchable,
    matched_blocks: list[tuple[int, int]],
    threshold: int,
    after_drop=None,
):
    """Shared greedy loop over a mutable weight matrix.

    Drops the lexicographically first matched touchable 3-entry (then
    2-entry) to 1 until the matched cost is strictly below ``threshold``.
    ``after_drop(weights, (i, j))`` may lower further entries in place (weight
    propagation). Returns the list of dropped cells.
    """
    weights = [list(row) for row in costs]
    drops: list[tuple[int, int]] = []
    while True:
        tracked = sum(weights[i][j] for i, j in matched_blocks)
        if tracked < threshold:
            return drops, weights
        pick = None
        for want in (3, 2):
            cells = sorted(
                {(i, j) for i, j in matched_blocks if weights[i][j] == want and touchable[i][j]}
            )
            if cells:
                pick = cells[0]
                break
        if pick is None:
            raise InfeasibleInstanceError("greedy ran out of droppable matched edges")
        weights[pick[0]][pick[1]] = 1
        drops.append(pick)
        if after_drop is not None:
            after_drop(weights, pick)


def greedy_insert(inst: Instance, start: Matching | None = None) -> Solution:
    """Deterministic approximation for restricted insert-to-positive.

    Starting from a canonicalized minimum-cost perfect matching of the
    blow-up, repeatedly pick a matched touchable 3-entry (then 2-entry),
    insert the corresponding graph edge, and propagate the induced weight
    drops, until the matched cost falls below q. One drop per inserted edge:
    all copies of a block fall together.
    """
    _require_approx_variant(inst)
    feasible, _ = feasible_by_saturation(inst)
    if not feasible:
        raise InfeasibleInstanceError("no permissible insertion set flips this edge")
    setup = _setup(inst)
    if setup.rho == 0:
        single = _single_edit_solution(inst, "greedy")
        if single is not None:
            return single
    if start is None:
        start = canonicalize_matching(setup.bm, setup.mcpm)
    else:
        if len(start.assignment) != setup.q:
            raise ValueError("start matching does not fit the blow-up")
        if matching_cost(setup.bm.costs, start.assignment) != setup.delta:
            raise ValueError("start matching must be minimum-cost")
    matched_blocks = [setup.bm.block(row, col) for row, col in enumerate(start.assignment)]

    state = {"graph": inst.graph, "cm": setup.cm}

    def after_drop(weights, cell):
        pair = ordered_pair(setup.cm.row_nodes[cell[0]], setup.cm.col_nodes[cell[1]])
        cm_now = CostMatrix(
            setup.cm.u,
            setup.cm.v,
            setup.cm.row_nodes,
            setup.cm.col_nodes,
            tuple(tuple(r) for r in weights),
            setup.cm.touchable,
        )
        # The entry is already 1 in `weights`; propagation only needs to
        # lower the 3-entries reachable through the new edge.
        updated = weight_propagation(state["graph"], cm_now, (setup.cm.row_nodes[cell[0]], setup.cm.col_nodes[cell[1]]))
        for i in range(len(weights)):
            for j in range(len(weights[i])):
                weights[i][j] = updated.costs[i][j]
        state["graph"] = state["graph"].insert_edges([(pair, 1)])

    drops, _ = greedy_schedule(
        setup.cm.costs,
        setup.cm.touchable,
        matched_blocks,
        setup.q,
        after_drop=after_drop,
    )
    return _finish_insert_solution(inst, drops, "greedy", len(drops))


# -- randomized ------------------------------------------------------------------


@dataclass(frozen=True)
class _SignatureCounts:
    n3: int
    n2_touchable: int


def randomized_insert(inst: Instance, seed: int, *, trials: int = 4) -> Solution:
    """Randomized approximation for restricted insert-to-positive.

    Sweeps every reachable matching cost x, takes the cost-x matching with
    the most 3-edges (then most touchable 2-edges), computes its drop budget,
    and keeps the overall minimizer (ties to smaller x). The witness matching
    is recovered through the exact-cost machinery and the final edit set is
    verified by recomputation; randomness can degrade optimality but never
    validity.
    """
    _require_approx_variant(inst)
    feasible, _ = feasible_by_saturation(inst)
    if not feasible:
        raise InfeasibleInstanceError("no permissible insertion set flips this edge")
    setup = _setup(inst)
    if setup.rho == 0:
        single = _single_edit_solution(inst, "randomized")
        if single is not None:
            return single
    mask = setup.bm.touchable_mask()
    support = signature_support(setup.bm.costs, mask, trials=min(trials, 2), seed=seed)
    by_cost: dict[int, list[tuple[int, int]]] = {}
    for x, k, l in support:
        by_cost.setdefault(x, []).append((k, l))
    best: tuple[int, int, int, int, KappaState] | None = None  # (kappa, x, k, l, state)
    for x in range(setup.delta, 3 * setup.q + 1):
        if x not in by_cost:
            continue
        k, l = max(by_cost[x])  # most 3-edges, then most touchable 2-edges
        state = kappa_hat(_SignatureCounts(k, l), x, setup.delta, setup.rho, setup.q)
        if state.unwanted:
            continue
        if best is None or state.total < best[0]:
            best = (state.total, x, k, l, state)
    if best is None:
        raise RetryExhaustedError("no wanted matching signature was certified; nothing returned")
    _, x, k, l, state = best
    witness = matching_with_counts(
        setup.bm.costs, mask, x, k, l, trials=max(trials, 4), seed=seed
    )
    if witness is None:
        raise RetryExhaustedError("witness extraction failed for the selected signature")
    state = select_drop_edges(setup.bm, witness, state)
    blocks = {setup.bm.block(row, col) for row, col in state.selected_edges}
    return _finish_insert_solution(inst, blocks, "randomized", len(state.selected_edges))
