"""Shared samplers for random graphs and solver instances."""

from __future__ import annotations

import random

import pytest

from riccicrit import (
    Graph,
    INFINITY,
    Instance,
    ProblemVariant,
    Sign,
    feasible_by_saturation,
    ricci,
)


def random_connected_graph(rng: random.Random, n: int, *, weighted: bool = False, p: float = 0.45, max_w: int = 5) -> Graph:
    while True:
        edges = []
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < p:
                    w = rng.randint(1, max_w) if weighted else 1
                    edges.append((u, v, w))
        if not edges:
            continue
        g = Graph(n, edges, weighted=weighted)
        if all(g.shortest_dist(0, x) != INFINITY for x in range(n)):
            return g


def double_star(du: int, dv: int, cross: list[tuple[int, int]]) -> Graph:
    """u=0 and v=1 joined, with du-1 private u-neighbors, dv-1 private
    v-neighbors, and the given cross edges between the private sides. No
    intra-side edges, so the no-side-edges property always holds."""
    left = list(range(2, 2 + du - 1))
    right = list(range(2 + du - 1, 2 + du - 1 + dv - 1))
    edges = [(0, 1)] + [(0, x) for x in left] + [(1, y) for y in right]
    edges += [(left[i], right[j]) for (i, j) in cross]
    return Graph(2 + du - 1 + dv - 1, edges)


def sample_spade_instances(
    rng: random.Random,
    count: int,
    *,
    degree_pool: list[tuple[int, int, float]],
) -> list[Instance]:
    """Feasible uw-rt-ins-ntp double-star instances with negative curvature."""
    variant = ProblemVariant.parse("uw-rt-ins-ntp")
    out: list[Instance] = []
    attempts = 0
    while len(out) < count and attempts < count * 400:
        attempts += 1
        du, dv, p = degree_pool[rng.randrange(len(degree_pool))]
        cross = sorted(
            {(i, j) for i in range(du - 1) for j in range(dv - 1) if rng.random() < p}
        )
        g = double_star(du, dv, cross)
        base = ricci(g, (0, 1), route="flow")
        if base.sign != Sign.NEGATIVE:
            continue
        inst = Instance(g, (0, 1), variant)
        feasible, _ = feasible_by_saturation(inst)
        if not feasible:
            continue
        out.append(inst)
    if len(out) < count:
        raise RuntimeError(f"sampler only found {len(out)} of {count} instances")
    return out


@pytest.fixture(scope="session")
def rng() -> random.Random:
    return random.Random(20260810)
