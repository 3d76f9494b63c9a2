"""Access-restricted facade over a :class:`~slsr.graph.Graph`.

A sampler that only holds an :class:`UnknownNetworkView` can learn the node
count, draw nodes uniformly, read the neighbour list of a node it names,
and read the degree of a node it names.  Every read is recorded in the
view's :class:`AccessLog`, tagged with the phase that was active.

Degree reads are logged separately from neighbour-list reads: crawling
code routinely needs ``d(u)`` for the neighbours ``u`` of a node it is
visiting, and treating those as full neighbour-list reads would make the
audit meaningless.
"""
from __future__ import annotations

import threading
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import ParameterError
from .graph import Graph


@dataclass
class AccessLog:
    queried_nodes: set[int] = field(default_factory=set)
    query_count: int = 0
    uniform_draw_count: int = 0
    drawn_nodes: set[int] = field(default_factory=set)
    degree_probed: set[int] = field(default_factory=set)
    degree_query_count: int = 0
    queried_by_phase: dict[str, set[int]] = field(default_factory=lambda: defaultdict(set))
    probed_by_phase: dict[str, set[int]] = field(default_factory=lambda: defaultdict(set))


class UnknownNetworkView:
    def __init__(self, graph: Graph):
        self._graph = graph
        self.log = AccessLog()
        self._lock = threading.Lock()
        self._phase = "default"

    @property
    def node_count(self) -> int:
        return self._graph.node_count

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        prev, self._phase = self._phase, name
        try:
            yield
        finally:
            self._phase = prev

    def sample_uniform_nodes(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """``count`` distinct nodes drawn uniformly (without replacement)."""
        n = self.node_count
        if not 0 <= count <= n:
            raise ParameterError(f"cannot draw {count} distinct nodes from {n}")
        nodes = rng.choice(n, size=count, replace=False).astype(np.int64)
        with self._lock:
            self.log.uniform_draw_count += count
            self.log.drawn_nodes.update(nodes.tolist())
        return nodes

    def draw_stream(self, rng: np.random.Generator) -> Iterator[int]:
        """Uniform draws without replacement, one at a time, until exhausted."""
        for v in rng.permutation(self.node_count).tolist():
            with self._lock:
                self.log.uniform_draw_count += 1
                self.log.drawn_nodes.add(v)
            yield v

    def neighbors(self, v: int) -> np.ndarray:
        v = int(v)
        with self._lock:
            self.log.query_count += 1
            self.log.queried_nodes.add(v)
            self.log.queried_by_phase[self._phase].add(v)
        return self._graph.neighbors(v)

    def neighbors_many(self, nodes) -> tuple[np.ndarray, np.ndarray]:
        """Neighbour lists of ``nodes`` concatenated, plus each node's list length.

        Logged exactly like one :meth:`neighbors` call per node.
        """
        nodes = np.asarray(nodes, dtype=np.int64)
        listed = nodes.tolist()
        with self._lock:
            self.log.query_count += len(listed)
            self.log.queried_nodes.update(listed)
            self.log.queried_by_phase[self._phase].update(listed)
        g = self._graph
        lens = g.degrees[nodes]
        starts = np.repeat(g.indptr[nodes] - np.concatenate([[0], np.cumsum(lens)[:-1]]), lens)
        return g.indices[np.arange(lens.sum()) + starts], lens

    def degree(self, v: int) -> int:
        v = int(v)
        with self._lock:
            self.log.degree_query_count += 1
            self.log.degree_probed.add(v)
            self.log.probed_by_phase[self._phase].add(v)
        return self._graph.degree(v)

    def degrees(self, nodes: np.ndarray) -> np.ndarray:
        nodes = np.asarray(nodes, dtype=np.int64)
        listed = nodes.tolist()
        with self._lock:
            self.log.degree_query_count += len(listed)
            self.log.degree_probed.update(listed)
            self.log.probed_by_phase[self._phase].update(listed)
        return self._graph.degrees[nodes]

    def induced_subgraph(self, nodes) -> Graph:
        """Subgraph induced on ``nodes``; reads (and logs) each node's neighbour list."""
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        listed = nodes.tolist()
        with self._lock:
            self.log.query_count += len(listed)
            self.log.queried_nodes.update(listed)
            self.log.queried_by_phase[self._phase].update(listed)
        return self._graph.induced_subgraph(nodes)

    def subgraph_from_edges(self, nodes: np.ndarray, edges: np.ndarray) -> Graph:
        """Assemble a subgraph from node/edge sets the caller already discovered."""
        g = self._graph
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        local = np.searchsorted(nodes, edges)
        return Graph.from_edges(local[:, 0], local[:, 1], labels=g.labels[nodes],
                                n=nodes.size, drop_isolated=False)


def view(g: Graph) -> UnknownNetworkView:
    return UnknownNetworkView(g)
