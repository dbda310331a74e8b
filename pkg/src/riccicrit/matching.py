"""Min-cost perfect matching and randomized exact-cost matching on square matrices.

Three layers live here:

* a deterministic assignment solver (potentials + shortest augmenting paths,
  cubic time, exact integer arithmetic, lexicographic tie-breaking);
* an exhaustive enumerator used as the desk-scale oracle;
* randomized search for perfect matchings of a prescribed exact cost, and the
  refinement that also prescribes how many 3-cost and touchable 2-cost edges
  the matching uses. Search runs over a prime field via determinant
  interpolation (see ``_detcube``); every witness is verified before it is
  returned, so randomness can only cause a miss, never a wrong answer.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ._detcube import PRIME, SignatureCube, coefficient_at
from .errors import FieldConfigError, OracleBoundError

ENUMERATION_BOUND = 8


@dataclass(frozen=True)
class Matching:
    """A perfect matching of a square cost matrix.

    ``assignment[i]`` is the column matched to row ``i``; ``cost`` is the sum
    of the matched entries under the matrix the matching was computed for.
    """

    assignment: tuple[int, ...]
    cost: int

    def __post_init__(self):
        n = len(self.assignment)
        if sorted(self.assignment) != list(range(n)):
            raise ValueError("assignment must be a permutation of 0..n-1")

    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, j) for i, j in enumerate(self.assignment))

    def to_json_dict(self) -> dict:
        return {"assignment": list(self.assignment), "cost": self.cost}


@dataclass(frozen=True)
class EdgeClassCounts:
    """Matched-edge counts by cost class, the 2-class split by touchability."""

    n0: int
    n1: int
    n2_touchable: int
    n2_untouchable: int
    n3: int

    @property
    def total(self) -> int:
        return self.n0 + self.n1 + self.n2_touchable + self.n2_untouchable + self.n3

    @property
    def cost(self) -> int:
        return self.n1 + 2 * (self.n2_touchable + self.n2_untouchable) + 3 * self.n3


def _check_square(costs: Sequence[Sequence[int]]) -> int:
    n = len(costs)
    if n == 0:
        raise ValueError("cost matrix must be non-empty")
    for row in costs:
        if len(row) != n:
            raise ValueError("cost matrix must be square")
        for c in row:
            if not isinstance(c, (int, np.integer)) or c < 0:
                raise ValueError(f"costs must be non-negative integers, got {c!r}")
    return n


def matching_cost(costs: Sequence[Sequence[int]], assignment: Sequence[int]) -> int:
    return sum(costs[i][j] for i, j in enumerate(assignment))


def _solve_assignment(costs: Sequence[Sequence[int]]) -> list[int]:
    """Classical O(n^3) assignment algorithm (dual potentials, 1-indexed cols).

    Works on arbitrary-precision integers so callers may pass perturbed or
    shifted costs without overflow concerns.
    """
    n = len(costs)
    inf = float("inf")
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    match_row = [0] * (n + 1)  # column -> matched row (1-indexed, 0 = free)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        match_row[0] = i
        j0 = 0
        minv: list = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = match_row[j0]
            delta = inf
            j1 = -1
            row = costs[i0 - 1]
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match_row[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match_row[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match_row[j0] = match_row[j1]
            j0 = j1
    assignment = [0] * n
    for j in range(1, n + 1):
        assignment[match_row[j] - 1] = j - 1
    return assignment


def min_cost_perfect_matching(costs: Sequence[Sequence[int]], *, lex_tiebreak: bool = True) -> Matching:
    """Optimal assignment; ties broken toward the lexicographically smallest
    assignment vector (row 0 first) so repeated runs are reproducible."""
    n = _check_square(costs)
    if lex_tiebreak:
        # Encode the lexicographic preference as an additive perturbation that
        # can never overturn a strict cost difference.
        base = n + 1
        rank = [base ** (n - 1 - i) for i in range(n)]
        shift = base**n
        work = [[costs[i][j] * shift + j * rank[i] for j in range(n)] for i in range(n)]
        assignment = _solve_assignment(work)
    else:
        assignment = _solve_assignment(costs)
    return Matching(tuple(assignment), matching_cost(costs, assignment))


def enumerate_matchings(costs: Sequence[Sequence[int]], *, bound: int = ENUMERATION_BOUND) -> Iterator[Matching]:
    """Yield all q! perfect matchings with their costs, in lexicographic order.

    Desk-scale oracle only; refuses matrices larger than ``bound``.
    """
    n = _check_square(costs)
    if n > bound:
        raise OracleBoundError(f"enumeration refused: q={n} exceeds bound {bound}")
    for perm in itertools.permutations(range(n)):
        yield Matching(perm, matching_cost(costs, perm))


def class_counts(
    costs: Sequence[Sequence[int]],
    touchable_mask: Sequence[Sequence[bool]],
    m: Matching,
) -> EdgeClassCounts:
    """Count the matched edges of each cost class (costs must lie in 0..3)."""
    n = _check_square(costs)
    if len(m.assignment) != n:
        raise ValueError("matching size does not fit the matrix")
    n0 = n1 = n2t = n2u = n3 = 0
    for i, j in enumerate(m.assignment):
        c = costs[i][j]
        if c == 0:
            n0 += 1
        elif c == 1:
            n1 += 1
        elif c == 2:
            if touchable_mask[i][j]:
                n2t += 1
            else:
                n2u += 1
        elif c == 3:
            n3 += 1
        else:
            raise ValueError(f"class counting expects costs in 0..3, got {c}")
    return EdgeClassCounts(n0, n1, n2t, n2u, n3)


# -- randomized exact-cost search ---------------------------------------------


def shift_constants(q: int) -> tuple[int, int]:
    """Class-separating weight shifts: K2 dominates any base-cost change and
    K1 dominates any K2 change, which is all the uniqueness argument needs."""
    k2 = 4 * q * q + 1
    k1 = 4 * q * q * k2 + 1
    return k1, k2


def _decompose(value: int, bases: tuple[int, ...]) -> tuple[int, ...] | None:
    """Digits of ``value`` in the mixed-radix system (bases descending, then 1)."""
    digits = []
    rest = value
    for b in bases:
        digits.append(rest // b)
        rest %= b
    digits.append(rest)
    if any(d < 0 for d in digits):
        return None
    return tuple(digits)


def _digit_matrix(costs: Sequence[Sequence[int]], bases: tuple[int, ...], q: int) -> np.ndarray:
    naxes = len(bases) + 1
    digits = np.zeros((q, q, naxes), dtype=np.int64)
    for i in range(q):
        for j in range(q):
            d = _decompose(int(costs[i][j]), bases)
            if d is None:
                raise FieldConfigError("cost entry does not decompose over the digit bases")
            digits[i, j, :] = d
    # Faithful encoding: the summed lower digits of any q edges must never
    # carry into the next base, otherwise two different digit signatures
    # could share a total cost.
    ext_bases = tuple(bases) + (1,)
    for axis in range(len(bases)):
        carry = 0
        for lower in range(axis + 1, naxes):
            carry += q * int(digits[:, :, lower].max(initial=0)) * ext_bases[lower]
        if carry >= ext_bases[axis]:
            raise FieldConfigError("digit bases too close together for this q")
    return digits


class _CubeCache:
    """Per-(matrix, seed, trial) signature cubes, shared across targets.

    Existence queries against the same matrix and seed re-use the same random
    scalars, so sweeping many targets costs one interpolation per trial.
    """

    def __init__(self, maxsize: int = 64):
        self.maxsize = maxsize
        self._store: dict = {}

    def get(self, key, build):
        got = self._store.get(key)
        if got is None:
            got = build()
            if len(self._store) >= self.maxsize:
                self._store.pop(next(iter(self._store)))
            self._store[key] = got
        return got


_CUBES = _CubeCache()


def _trial_scalars(seed: int, trial: int, q: int) -> np.ndarray:
    rng = np.random.default_rng((seed, trial, q))
    return rng.integers(1, PRIME, size=(q, q), dtype=np.int64)


def _trial_cube(digits: np.ndarray, seed: int, trial: int) -> tuple[SignatureCube, np.ndarray]:
    q = digits.shape[0]
    key = (digits.tobytes(), digits.shape, seed, trial)
    return _CUBES.get(key, lambda: _build_trial(digits, seed, trial))


def _build_trial(digits: np.ndarray, seed: int, trial: int) -> tuple[SignatureCube, np.ndarray]:
    scalars = _trial_scalars(seed, trial, digits.shape[0])
    return SignatureCube(digits, scalars), scalars


def _extract_assignment(
    digits: np.ndarray,
    scalars: np.ndarray,
    target: tuple[int, ...],
) -> list[int] | None:
    """Self-reduction: fix one edge of the certified signature at a time.

    For the first live row, try columns in ascending order and keep the first
    whose residual minor still certifies the remaining digit budget. A false
    negative (random unluck) aborts the attempt; the caller retries with
    fresh scalars.
    """
    n = digits.shape[0]
    live_rows = list(range(n))
    live_cols = list(range(n))
    remaining = list(target)
    chosen: dict[int, int] = {}
    while live_rows:
        i = live_rows[0]
        rest_rows = live_rows[1:]
        found = None
        for j in live_cols:
            after = [remaining[a] - int(digits[i, j, a]) for a in range(len(remaining))]
            if any(x < 0 for x in after):
                continue
            if not rest_rows:
                if all(x == 0 for x in after):
                    found = j
                    break
                continue
            sub = digits[np.ix_(rest_rows, [c for c in live_cols if c != j])]
            subsc = scalars[np.ix_(rest_rows, [c for c in live_cols if c != j])]
            if coefficient_at(sub, subsc, tuple(after)) != 0:
                found = j
                break
        if found is None:
            return None
        chosen[i] = found
        remaining = [remaining[a] - int(digits[i, found, a]) for a in range(len(remaining))]
        live_rows = rest_rows
        live_cols = [c for c in live_cols if c != found]
    return [chosen[i] for i in range(n)]


def exact_cost_matching(
    costs: Sequence[Sequence[int]],
    target: int,
    *,
    trials: int = 20,
    seed: int = 0,
    bases: tuple[int, ...] = (),
) -> Matching | None:
    """Perfect matching of cost exactly ``target``, or None if none was found.

    A miss requires every trial's random scalars to kill the certifying
    coefficient, which happens with probability at most (q/PRIME) per trial;
    None is therefore wrong only with vanishing probability. A returned
    matching is always genuine: its cost is verified before returning.
    ``bases`` optionally declares that costs live in a mixed-radix system
    (large class-separating constants); digits are then interpolated
    independently, which keeps the polynomial degrees proportional to q
    instead of to the constants.
    """
    q = _check_square(costs)
    if target < 0:
        return None
    if trials < 1:
        raise ValueError("trials must be positive")
    # The minimum-cost matching is a free certificate for its own cost.
    mcpm = min_cost_perfect_matching(costs)
    if mcpm.cost == target:
        return mcpm
    if target < mcpm.cost:
        return None

    digits = _digit_matrix(costs, bases, q)
    tgt = _decompose(target, bases)
    if tgt is None:
        return None
    if len(tgt) != digits.shape[2]:
        raise FieldConfigError("target does not decompose over the digit bases")

    for trial in range(trials):
        cube, scalars = _trial_cube(digits, seed, trial)
        if cube.coefficient(tgt) == 0:
            continue
        assignment = _extract_assignment(digits, scalars, tgt)
        if assignment is None:
            continue
        cost = matching_cost(costs, assignment)
        if cost == target:
            return Matching(tuple(assignment), cost)
    return None


def matching_with_counts(
    costs: Sequence[Sequence[int]],
    touchable_mask: Sequence[Sequence[bool]],
    target_cost: int,
    k: int,
    l: int,
    *,
    trials: int = 20,
    seed: int = 0,
) -> Matching | None:
    """Perfect matching of cost ``target_cost`` with exactly ``k`` 3-edges and
    ``l`` touchable 2-edges, or None.

    Reduction: flip weights e -> 4 - w(e), then lift every flipped 1-edge
    (original 3-edge) to weight K1 and every touchable flipped 2-edge
    (original touchable 2-edge) to weight K2, and ask for cost exactly
    K1*k + K2*l + (q1 - k - 2*l) with q1 = 4q - target_cost: the lifted
    edges' base weights (k ones and l twos) move into the K terms. The shift
    constants are far enough apart that only (k, l)-correct matchings can hit
    that total. Returned witnesses are re-verified against the original
    matrix unconditionally.
    """
    q = _check_square(costs)
    for row in costs:
        for c in row:
            if c > 3:
                raise ValueError("matching_with_counts expects costs in 0..3")
    if k < 0 or l < 0 or k + l > q:
        return None
    k1, k2 = shift_constants(q)

    def _shifted(i: int, j: int) -> int:
        c = costs[i][j]
        if c == 3:
            return k1
        if c == 2 and touchable_mask[i][j]:
            return k2
        return 4 - c

    shifted = [[_shifted(i, j) for j in range(q)] for i in range(q)]
    q1 = 4 * q - target_cost
    alpha = q1 - k - 2 * l
    if alpha < 0:
        return None
    delta = k1 * k + k2 * l + alpha
    found = exact_cost_matching(shifted, delta, trials=trials, seed=seed, bases=(k1, k2))
    if found is None:
        return None
    cost = matching_cost(costs, found.assignment)
    counts = class_counts(costs, touchable_mask, Matching(found.assignment, cost))
    if cost != target_cost or counts.n3 != k or counts.n2_touchable != l:
        return None
    return Matching(found.assignment, cost)


def signature_support(
    costs: Sequence[Sequence[int]],
    touchable_mask: Sequence[Sequence[bool]],
    *,
    trials: int = 2,
    seed: int = 0,
) -> set[tuple[int, int, int]]:
    """All (cost, n3, touchable-n2) signatures certified by random trials.

    Every returned signature truly has a matching; signatures can only be
    missed, with per-cell probability at most q/PRIME per trial. Used by the
    solver sweep, which wants the whole landscape at once.
    """
    q = _check_square(costs)
    digits = np.zeros((q, q, 3), dtype=np.int64)
    for i in range(q):
        for j in range(q):
            c = int(costs[i][j])
            if c > 3:
                raise ValueError("signature_support expects costs in 0..3")
            digits[i, j] = (
                4 - c,
                1 if c == 3 else 0,
                1 if (c == 2 and touchable_mask[i][j]) else 0,
            )
    merged: set[tuple[int, int, int]] = set()
    for trial in range(trials):
        cube, _ = _trial_cube(digits, seed, trial)
        for alpha, n3, n2t in cube.support():
            merged.add((4 * q - alpha, n3, n2t))
    return merged
