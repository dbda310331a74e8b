"""Immutable undirected graphs with positive integer edge weights.

Node ids are dense integers ``0..node_count-1``. Mutation helpers return new
graph values, so instances can be shared freely between threads and used as
dictionary keys. Distances are exact integers computed on demand (BFS for
unweighted graphs, Dijkstra otherwise) and memoized per source node.
"""

from __future__ import annotations

import math
from collections import deque
from heapq import heappop, heappush
from typing import Iterable

from .errors import EdgeListParseError

INFINITY = math.inf

Pair = tuple[int, int]


def ordered_pair(a: int, b: int) -> Pair:
    return (a, b) if a <= b else (b, a)


class Graph:
    """Undirected graph value: weighted or unweighted, never both at once.

    An unweighted graph carries weight 1 on every edge and keeps that
    invariant under mutation; a weighted graph allows any positive integer
    weights. Self-loops and parallel edges are rejected.
    """

    __slots__ = ("node_count", "weighted", "_weights", "_adj", "_dist_rows", "_edge_tuple", "_hash")

    def __init__(
        self,
        node_count: int,
        edges: Iterable[tuple] = (),
        weighted: bool = False,
    ):
        if not isinstance(node_count, int) or node_count < 0:
            raise ValueError(f"node_count must be a non-negative integer, got {node_count!r}")
        weights: dict[Pair, int] = {}
        for item in edges:
            if len(item) == 2:
                u, v = item
                w = 1
            elif len(item) == 3:
                u, v, w = item
            else:
                raise ValueError(f"edge must be (u, v) or (u, v, w), got {item!r}")
            if not (isinstance(u, int) and isinstance(v, int)):
                raise ValueError(f"node ids must be integers, got {item!r}")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"node id out of range in edge {item!r}")
            if u == v:
                raise ValueError(f"self-loop at node {u} is not allowed")
            if not isinstance(w, int) or w < 1:
                raise ValueError(f"edge weight must be a positive integer, got {item!r}")
            if not weighted and w != 1:
                raise ValueError(f"unweighted graph cannot carry weight {w} on edge ({u}, {v})")
            key = ordered_pair(u, v)
            if key in weights:
                raise ValueError(f"duplicate edge {key}")
            weights[key] = w

        adj: list[dict[int, int]] = [dict() for _ in range(node_count)]
        for (u, v), w in weights.items():
            adj[u][v] = w
            adj[v][u] = w

        object.__setattr__(self, "node_count", node_count)
        object.__setattr__(self, "weighted", bool(weighted))
        object.__setattr__(self, "_weights", weights)
        object.__setattr__(self, "_adj", adj)
        object.__setattr__(self, "_dist_rows", {})
        object.__setattr__(self, "_edge_tuple", tuple(sorted((u, v, w) for (u, v), w in weights.items())))
        object.__setattr__(self, "_hash", hash((node_count, weighted, self._edge_tuple)))

    def __setattr__(self, name, value):
        raise AttributeError("Graph values are immutable")

    def __reduce__(self):
        return (Graph, (self.node_count, self._edge_tuple, self.weighted))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and self.weighted == other.weighted
            and self._edge_tuple == other._edge_tuple
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        kind = "weighted" if self.weighted else "unweighted"
        return f"Graph(n={self.node_count}, m={len(self._weights)}, {kind})"

    # -- accessors ---------------------------------------------------------

    def edges(self) -> tuple[tuple[int, int, int], ...]:
        """All edges as sorted ``(u, v, w)`` triples with ``u < v``."""
        return self._edge_tuple

    def edge_count(self) -> int:
        return len(self._weights)

    def has_edge(self, u: int, v: int) -> bool:
        return ordered_pair(u, v) in self._weights

    def weight(self, u: int, v: int) -> int:
        try:
            return self._weights[ordered_pair(u, v)]
        except KeyError:
            raise ValueError(f"no edge between {u} and {v}") from None

    def max_weight(self) -> int:
        """Largest edge weight W (1 for edgeless or unweighted graphs)."""
        return max(self._weights.values(), default=1)

    def _check_node(self, x: int) -> None:
        if not isinstance(x, int) or not 0 <= x < self.node_count:
            raise ValueError(f"invalid node id {x!r} for graph with {self.node_count} nodes")

    def neighbors(self, x: int) -> tuple[int, ...]:
        self._check_node(x)
        return tuple(sorted(self._adj[x]))

    def degree(self, x: int) -> int:
        self._check_node(x)
        return len(self._adj[x])

    def closed_neighborhood(self, x: int) -> tuple[int, ...]:
        """``x`` plus its neighbors, in ascending node-id order."""
        self._check_node(x)
        return tuple(sorted(set(self._adj[x]) | {x}))

    def common_neighbors(self, u: int, v: int) -> tuple[int, ...]:
        self._check_node(u)
        self._check_node(v)
        return tuple(sorted(set(self._adj[u]) & set(self._adj[v])))

    # -- distances ---------------------------------------------------------

    def distances_from(self, x: int) -> tuple:
        """Exact single-source distances; unreachable nodes get INFINITY."""
        self._check_node(x)
        cached = self._dist_rows.get(x)
        if cached is not None:
            return cached
        if self.weighted:
            row = self._dijkstra(x)
        else:
            row = self._bfs(x)
        self._dist_rows[x] = row
        return row

    def _bfs(self, src: int) -> tuple:
        dist: list = [INFINITY] * self.node_count
        dist[src] = 0
        queue = deque([src])
        while queue:
            x = queue.popleft()
            d = dist[x] + 1
            for y in self._adj[x]:
                if dist[y] == INFINITY:
                    dist[y] = d
                    queue.append(y)
        return tuple(dist)

    def _dijkstra(self, src: int) -> tuple:
        dist: list = [INFINITY] * self.node_count
        dist[src] = 0
        heap: list[tuple[int, int]] = [(0, src)]
        while heap:
            d, x = heappop(heap)
            if d > dist[x]:
                continue
            for y, w in self._adj[x].items():
                nd = d + w
                if nd < dist[y]:
                    dist[y] = nd
                    heappush(heap, (nd, y))
        return tuple(dist)

    def shortest_dist(self, x: int, y: int):
        """Shortest-path distance between two nodes, INFINITY if disconnected."""
        self._check_node(y)
        return self.distances_from(x)[y]

    # -- mutation (returns new values) --------------------------------------

    def insert_edges(self, es: Iterable[tuple[Pair, int]]) -> "Graph":
        """New graph with the given ``((u, v), weight)`` edges added.

        Inserting into an unweighted graph demands weight 1; weighted graphs
        cap inserted weights at ``(node_count - 1) * W`` since heavier edges
        can never shorten any path.
        """
        additions: dict[Pair, int] = {}
        cap = max(1, (self.node_count - 1) * self.max_weight())
        for pair, w in es:
            u, v = pair
            self._check_node(u)
            self._check_node(v)
            if u == v:
                raise ValueError(f"self-loop at node {u} is not allowed")
            key = ordered_pair(u, v)
            if key in self._weights:
                raise ValueError(f"edge {key} already present")
            if key in additions:
                raise ValueError(f"duplicate insertion of edge {key}")
            if not isinstance(w, int) or w < 1:
                raise ValueError(f"inserted weight must be a positive integer, got {w!r}")
            if not self.weighted and w != 1:
                raise ValueError("unweighted graph only accepts weight-1 insertions")
            if self.weighted and w > cap:
                raise ValueError(f"inserted weight {w} exceeds the (n-1)*W cap of {cap}")
            additions[key] = w
        if not additions:
            return self
        merged = [(u, v, w) for (u, v), w in self._weights.items()]
        merged.extend((u, v, w) for (u, v), w in additions.items())
        return Graph(self.node_count, merged, weighted=self.weighted)

    def delete_edges(self, es: Iterable[Pair]) -> "Graph":
        """New graph with the given unordered node pairs removed."""
        removals: set[Pair] = set()
        for pair in es:
            u, v = pair
            key = ordered_pair(u, v)
            if key not in self._weights:
                raise ValueError(f"edge {key} not present")
            if key in removals:
                raise ValueError(f"duplicate deletion of edge {key}")
            removals.add(key)
        if not removals:
            return self
        kept = [(u, v, w) for (u, v), w in self._weights.items() if (u, v) not in removals]
        return Graph(self.node_count, kept, weighted=self.weighted)


# -- edge-list text format ---------------------------------------------------
#
# One edge per line: "u v" (unweighted) or "u v w" (weighted). Anything after
# a '#' is a comment; blank lines are skipped. Node ids are non-negative
# integers; node_count is one past the largest id seen.


def parse_edge_list(text: str) -> Graph:
    triples: list[tuple[int, int, int]] = []
    weighted = False
    max_node = -1
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise EdgeListParseError(line_no, f"expected 'u v' or 'u v w', got {raw.strip()!r}")
        try:
            values = [int(p) for p in parts]
        except ValueError:
            raise EdgeListParseError(line_no, f"non-integer field in {raw.strip()!r}") from None
        u, v = values[0], values[1]
        w = values[2] if len(values) == 3 else 1
        if u < 0 or v < 0:
            raise EdgeListParseError(line_no, "node ids must be non-negative")
        if u == v:
            raise EdgeListParseError(line_no, f"self-loop at node {u}")
        if w < 1:
            raise EdgeListParseError(line_no, f"weight must be positive, got {w}")
        if w != 1:
            weighted = True
        triples.append((u, v, w))
        max_node = max(max_node, u, v)
    seen: set[Pair] = set()
    for u, v, _ in triples:
        key = ordered_pair(u, v)
        if key in seen:
            raise EdgeListParseError(0, f"duplicate edge {key}")
        seen.add(key)
    return Graph(max_node + 1, triples, weighted=weighted)


def format_edge_list(g: Graph) -> str:
    lines = [f"# nodes: {g.node_count}"]
    for u, v, w in g.edges():
        lines.append(f"{u} {v} {w}" if g.weighted else f"{u} {v}")
    return "\n".join(lines) + "\n"


def load_edge_list(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_edge_list(fh.read())
