"""Weighted directed graphs and their shortest-path structure.

Node ids are 1-based integers.  An edge (i, j, w) means node i can hand off
to node j at cost w > 0.  A nonempty proper subset of nodes acts as sources;
every other node wants the cheapest directed route to any source.

Besides plain distances, the solver extracts the structure the rest of the
package feeds on:

* ``true_parents`` -- per node, the out-neighbors attaining the minimum of
  ``p_j + w_ij`` over the neighborhood;
* ``effective_diameter`` -- the largest node count of a chain that follows
  true-parent links down to a source;
* ``path_gap`` -- the smallest margin by which any non-optimal neighbor
  choice loses, over all non-source nodes (+inf when nothing competes).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

from .errors import (
    DomainError,
    ParseError,
    UnknownEdgeError,
    UnreachableError,
    ValidationError,
)

# Membership tolerance for argmin sets; edge weights are assumed to dwarf it.
ARGMIN_TOL = 1e-12


@dataclass(frozen=True)
class WeightedDigraph:
    """Directed graph with positive edge weights and a set of source nodes."""

    node_count: int
    sources: frozenset[int]
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self) -> None:
        n = self.node_count
        if n < 2:
            raise ValidationError("graph needs at least two nodes")
        if not self.sources:
            raise ValidationError("source set is empty")
        if any(not (1 <= s <= n) for s in self.sources):
            raise ValidationError("source id outside 1..node_count")
        if len(self.sources) >= n:
            raise ValidationError("every node is a source; nothing to solve")
        seen: set[tuple[int, int]] = set()
        for i, j, w in self.edges:
            if not (1 <= i <= n and 1 <= j <= n):
                raise ValidationError(f"edge ({i}, {j}) references an unknown node")
            if i == j:
                raise ValidationError(f"self-loop on node {i}")
            if not math.isfinite(w) or w <= 0.0:
                raise ValidationError(f"edge ({i}, {j}) has nonpositive weight {w!r}")
            if (i, j) in seen:
                raise ValidationError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))

    @cached_property
    def out_adjacency(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        """``out_adjacency[i-1]`` lists ``(j, w)`` over the out-neighbors of i."""
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.node_count)]
        for i, j, w in self.edges:
            adj[i - 1].append((j, w))
        return tuple(tuple(row) for row in adj)

    @cached_property
    def edge_index(self) -> Mapping[tuple[int, int], int]:
        """Position of each (i, j) pair inside ``edges``."""
        return {(i, j): k for k, (i, j, _) in enumerate(self.edges)}

    @property
    def non_sources(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.node_count + 1) if i not in self.sources)

    def neighbors(self, i: int) -> tuple[int, ...]:
        return tuple(j for j, _ in self.out_adjacency[i - 1])

    def weight(self, i: int, j: int) -> float:
        try:
            return self.edges[self.edge_index[(i, j)]][2]
        except KeyError:
            raise UnknownEdgeError(f"({i}, {j}) is not an edge") from None


def _parse_int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"line {lineno}: bad {what} {token!r}") from None


def _parse_float(token: str, lineno: int, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"line {lineno}: bad {what} {token!r}") from None


def load_graph(text: str) -> WeightedDigraph:
    """Parse the line-oriented edge-list format.

    First significant line is ``nodes N``, second is ``sources s1 [s2 ...]``,
    every following line is ``i j w``.  ``#`` starts a comment; blank lines
    are ignored.  Raises :class:`ParseError` with the offending line number,
    or :class:`ValidationError` when the parsed graph breaks an invariant.
    """
    node_count: int | None = None
    sources: list[int] = []
    edges: list[tuple[int, int, float]] = []
    stage = 0  # 0: expect "nodes", 1: expect "sources", 2: edge lines
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if stage == 0:
            if parts[0] != "nodes" or len(parts) != 2:
                raise ParseError(f"line {lineno}: expected 'nodes N'")
            node_count = _parse_int(parts[1], lineno, "node count")
            stage = 1
        elif stage == 1:
            if parts[0] != "sources" or len(parts) < 2:
                raise ParseError(f"line {lineno}: expected 'sources s1 [s2 ...]'")
            sources = [_parse_int(p, lineno, "source id") for p in parts[1:]]
            stage = 2
        else:
            if len(parts) != 3:
                raise ParseError(f"line {lineno}: expected 'i j w'")
            i = _parse_int(parts[0], lineno, "tail id")
            j = _parse_int(parts[1], lineno, "head id")
            w = _parse_float(parts[2], lineno, "weight")
            edges.append((i, j, w))
    if stage != 2 or node_count is None:
        raise ParseError("document ended before the 'nodes'/'sources' headers")
    return WeightedDigraph(node_count, frozenset(sources), tuple(edges))


def dump_graph(g: WeightedDigraph) -> str:
    """Inverse of :func:`load_graph`; weights keep 17 significant digits."""
    lines = [f"nodes {g.node_count}"]
    lines.append("sources " + " ".join(str(s) for s in sorted(g.sources)))
    for i, j, w in g.edges:
        lines.append(f"{i} {j} {w:.17g}")
    return "\n".join(lines) + "\n"


def check_reachability(g: WeightedDigraph) -> bool:
    """True iff every node has a directed path to some source."""
    rev: list[list[int]] = [[] for _ in range(g.node_count + 1)]
    for i, j, _ in g.edges:
        rev[j].append(i)
    seen = set(g.sources)
    stack = list(g.sources)
    while stack:
        j = stack.pop()
        for i in rev[j]:
            if i not in seen:
                seen.add(i)
                stack.append(i)
    return len(seen) == g.node_count


@dataclass(frozen=True)
class ShortestPathSolution:
    """Distances to the nearest source plus derived structure.

    Tuples are indexed by ``node_id - 1``.  ``path_gap`` is ``math.inf``
    when no node has a competing (non-optimal) out-edge.
    """

    p: tuple[float, ...]
    true_parents: tuple[frozenset[int], ...]
    effective_diameter: int
    path_gap: float

    def distance(self, i: int) -> float:
        return self.p[i - 1]

    def parents(self, i: int) -> frozenset[int]:
        return self.true_parents[i - 1]


def solve_shortest_paths(g: WeightedDigraph) -> ShortestPathSolution:
    """Multi-source Dijkstra on the edge-reversed graph.

    Raises :class:`UnreachableError` when some node cannot reach a source.
    Argmin-set membership uses the ``ARGMIN_TOL`` cushion so that floating
    point dust cannot drop a genuinely optimal parent.
    """
    if not check_reachability(g):
        missing = _unreachable_nodes(g)
        raise UnreachableError(f"nodes {missing} cannot reach any source")
    n = g.node_count
    rev: list[list[tuple[int, float]]] = [[] for _ in range(n + 1)]
    for i, j, w in g.edges:
        rev[j].append((i, w))

    dist = [math.inf] * (n + 1)
    heap: list[tuple[float, int]] = []
    for s in sorted(g.sources):
        dist[s] = 0.0
        heapq.heappush(heap, (0.0, s))
    while heap:
        d, j = heapq.heappop(heap)
        if d > dist[j]:
            continue
        for i, w in rev[j]:
            nd = d + w
            if nd < dist[i]:
                dist[i] = nd
                heapq.heappush(heap, (nd, i))

    parents: list[frozenset[int]] = [frozenset()] * n
    for i in g.non_sources:
        best = dist[i]
        members = {
            j for j, w in g.out_adjacency[i - 1] if dist[j] + w <= best + ARGMIN_TOL
        }
        parents[i - 1] = frozenset(members)

    # Longest parent chain: parents always have strictly smaller distance,
    # so a sweep in increasing-distance order sees them first.
    order = sorted(range(1, n + 1), key=lambda i: dist[i])
    longest = [1] * (n + 1)
    for i in order:
        ps = parents[i - 1]
        if ps:
            longest[i] = 1 + max(longest[j] for j in ps)
    diameter = max(longest[1:])

    gap = math.inf
    for i in g.non_sources:
        for j, w in g.out_adjacency[i - 1]:
            if j not in parents[i - 1]:
                gap = min(gap, dist[j] + w - dist[i])

    return ShortestPathSolution(
        p=tuple(dist[1:]),
        true_parents=tuple(parents),
        effective_diameter=diameter,
        path_gap=gap,
    )


def _unreachable_nodes(g: WeightedDigraph) -> list[int]:
    rev: list[list[int]] = [[] for _ in range(g.node_count + 1)]
    for i, j, _ in g.edges:
        rev[j].append(i)
    seen = set(g.sources)
    stack = list(g.sources)
    while stack:
        j = stack.pop()
        for i in rev[j]:
            if i not in seen:
                seen.add(i)
                stack.append(i)
    return [i for i in range(1, g.node_count + 1) if i not in seen]


def parent_chain(sol: ShortestPathSolution, node: int) -> list[int]:
    """Source-first chain of true parents ending at ``node``.

    Ties are broken toward the smallest node id, so the chain is unique and
    reproducible.  A source yields the one-element chain ``[node]``.
    """
    chain = [node]
    cur = node
    while sol.true_parents[cur - 1]:
        cur = min(sol.true_parents[cur - 1])
        chain.append(cur)
        if len(chain) > len(sol.p):
            raise ValidationError("true-parent relation contains a cycle")
    chain.reverse()
    return chain


def _per_edge_values(
    g: WeightedDigraph,
    values: float | Sequence[float] | Mapping[tuple[int, int], float],
) -> list[float]:
    if isinstance(values, Mapping):
        return [float(values.get((i, j), 0.0)) for i, j, _ in g.edges]
    if isinstance(values, (int, float)):
        return [float(values)] * len(g.edges)
    out = [float(v) for v in values]
    if len(out) != len(g.edges):
        raise ValidationError(
            f"expected {len(g.edges)} per-edge values, got {len(out)}"
        )
    return out


def minus_graph(
    g: WeightedDigraph,
    lower_bounds: float | Sequence[float] | Mapping[tuple[int, int], float],
) -> WeightedDigraph:
    """Graph with each weight shrunk by its worst-case negative disturbance.

    ``lower_bounds`` may be a scalar, a sequence aligned with ``g.edges``,
    or a mapping keyed by (i, j).  Every bound must satisfy 0 <= u < w.
    """
    lows = _per_edge_values(g, lower_bounds)
    new_edges = []
    for (i, j, w), u in zip(g.edges, lows):
        if not 0.0 <= u < w:
            raise ValidationError(
                f"lower disturbance bound {u!r} not in [0, w) on edge ({i}, {j})"
            )
        new_edges.append((i, j, w - u))
    return WeightedDigraph(g.node_count, g.sources, tuple(new_edges))


def scale_graph(g: WeightedDigraph, factor: float) -> WeightedDigraph:
    """Multiply every weight by ``factor`` in (0, 1]; argmin structure is preserved."""
    if not 0.0 < factor <= 1.0:
        raise DomainError(f"scale factor must lie in (0, 1], got {factor!r}")
    return WeightedDigraph(
        g.node_count,
        g.sources,
        tuple((i, j, w * factor) for i, j, w in g.edges),
    )
