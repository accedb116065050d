"""Shared test utilities: independent oracles and seeded graph factories.

The brute-force solver enumerates every simple path with plain DFS, so it
shares no code with the production Dijkstra path and serves as its oracle.
"""

from __future__ import annotations

import math

import numpy as np

from dbmc import WeightedDigraph


def brute_force_distances(g: WeightedDigraph) -> dict[int, float]:
    """Min over all simple paths to any source, by exhaustive DFS."""
    adj = {i: list(g.out_adjacency[i - 1]) for i in range(1, g.node_count + 1)}

    def shortest_from(i: int, visited: frozenset[int]) -> float:
        if i in g.sources:
            return 0.0
        best = math.inf
        for j, w in adj[i]:
            if j in visited:
                continue
            tail = shortest_from(j, visited | {j})
            if w + tail < best:
                best = w + tail
        return best

    return {i: shortest_from(i, frozenset({i})) for i in range(1, g.node_count + 1)}


def brute_force_parents(
    g: WeightedDigraph, dist: dict[int, float], tol: float = 1e-12
) -> dict[int, frozenset[int]]:
    out = {}
    for i in range(1, g.node_count + 1):
        if i in g.sources:
            out[i] = frozenset()
            continue
        out[i] = frozenset(
            j for j, w in g.out_adjacency[i - 1] if dist[j] + w <= dist[i] + tol
        )
    return out


def random_weighted_graph(seed: int, max_nodes: int = 10) -> WeightedDigraph:
    """Seeded random graph: in-tree toward node 1 plus extra edges.

    Weights land on a 1e-3 grid so floating-point dust cannot flip argmin
    membership near the comparison tolerance.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, max_nodes + 1))

    def weight() -> float:
        return float(rng.integers(1, 5001)) / 1000.0

    edges = [(k, int(rng.integers(1, k)), weight()) for k in range(2, n + 1)]
    present = {(i, j) for i, j, _ in edges}
    for i in range(2, n + 1):
        for j in range(1, n + 1):
            if i != j and (i, j) not in present and rng.random() < 0.25:
                edges.append((i, j, weight()))
                present.add((i, j))
    return WeightedDigraph(n, frozenset({1}), tuple(edges))


def constant_initial(g: WeightedDigraph, value: float) -> np.ndarray:
    x0 = np.full(g.node_count, float(value))
    for s in g.sources:
        x0[s - 1] = 0.0
    return x0
