"""Slow, independent reference implementations used only by the tests.

None of these reuse library kernels: they work on plain Python sets and
dense numpy matrices so a shared bug cannot hide on both sides.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def adjacency_sets(g) -> dict[int, set[int]]:
    adj = {v: set() for v in range(g.node_count)}
    for u, v in g.edges().tolist():
        adj[u].add(v)
        adj[v].add(u)
    return adj


def literal_threshold(adj: dict[int, set[int]], sample) -> int:
    """The DT loop run exactly as written, rescanning the whole vertical set each step."""
    deg = {v: len(nb) for v, nb in adj.items()}
    sample = set(sample)
    d_max = max(deg[v] for v in sample)
    vertical: set[tuple[int, int]] = set()
    for k in range(1, d_max + 1):
        v_k = {v for v in sample if deg[v] == k}
        added = {(v, u) for v in v_k for u in adj[v] if deg[u] > k}
        removed = {(v, u) for (v, u) in vertical if deg[v] < k and deg[u] == k}
        vertical = (vertical | added) - removed
        if len(added) <= len(removed):
            return k - 1
    return d_max


def floyd_warshall(g) -> np.ndarray:
    n = g.node_count
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for u, v in g.edges().tolist():
        d[u, v] = d[v, u] = 1.0
    for k in range(n):
        d = np.minimum(d, d[:, k:k + 1] + d[k:k + 1, :])
    return d


def largest_component_nodes(dist: np.ndarray) -> list[int]:
    """Largest set of mutually reachable nodes; ties to the one with the smallest node."""
    n = dist.shape[0]
    seen, best = set(), []
    for v in range(n):
        if v in seen:
            continue
        comp = [int(u) for u in np.flatnonzero(np.isfinite(dist[v]))]
        seen.update(comp)
        if len(comp) > len(best):
            best = comp
    return best


def apl_oracle(g) -> tuple[float, dict[int, float]]:
    dist = floyd_warshall(g)
    comp = largest_component_nodes(dist)
    lengths = [int(dist[a, b]) for a, b in itertools.combinations(comp, 2)]
    counts: dict[int, int] = {}
    for l in lengths:
        counts[l] = counts.get(l, 0) + 1
    total = len(lengths)
    return sum(lengths) / total, {l: c / total for l, c in sorted(counts.items())}


def all_shortest_paths(adj, dist, s, t):
    """Every shortest s-t path, listed explicitly."""
    if s == t:
        yield [s]
        return
    for w in adj[s]:
        if dist[w, t] == dist[s, t] - 1:
            for rest in all_shortest_paths(adj, dist, w, t):
                yield [s] + rest


def betweenness_oracle(g, v: int) -> float:
    adj = adjacency_sets(g)
    dist = floyd_warshall(g)
    n = g.node_count
    total = 0.0
    for s, t in itertools.combinations(range(n), 2):
        if v in (s, t) or not math.isfinite(dist[s, t]):
            continue
        paths = list(all_shortest_paths(adj, dist, s, t))
        total += sum(v in p[1:-1] for p in paths) / len(paths)
    return total / ((n - 1) * (n - 2) / 2)


def closeness_oracle(g, v: int) -> float:
    row = floyd_warshall(g)[v]
    reach = row[np.isfinite(row) & (row > 0)]
    return reach.size / reach.sum()


def local_clustering_oracle(g) -> list[float]:
    adj = adjacency_sets(g)
    out = []
    for v in range(g.node_count):
        nb = sorted(adj[v])
        k = len(nb)
        if k < 2:
            out.append(0.0)
            continue
        links = sum(1 for a, b in itertools.combinations(nb, 2) if b in adj[a])
        out.append(links / (k * (k - 1) / 2))
    return out
