"""Immutable simple undirected graphs in compressed sparse row form.

Node ids are dense ``0..n-1`` integers.  The original (external) ids of an
ingested graph are kept in ``Graph.labels``, sorted ascending, so the
mapping in both directions is a plain array lookup / ``searchsorted``.
Subgraphs carry the labels of the nodes they were taken from.
"""
from __future__ import annotations

import gzip
import io
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import EmptyGraphError, ParameterError, ParseError


class Graph:
    """Simple undirected graph; adjacency lists are sorted and read-only."""

    __slots__ = ("indptr", "indices", "labels", "degrees", "_edge_keys")

    def __init__(self, indptr: np.ndarray, indices: np.ndarray, labels: np.ndarray | None = None):
        indptr = np.asarray(indptr, dtype=np.int64)
        indices = np.asarray(indices, dtype=np.int64)
        n = indptr.size - 1
        if labels is None:
            labels = np.arange(n, dtype=np.int64)
        labels = np.asarray(labels, dtype=np.int64)
        if labels.size != n:
            raise ParameterError("labels must have one entry per node")
        for arr in (indptr, indices, labels):
            arr.setflags(write=False)
        self.indptr = indptr
        self.indices = indices
        self.labels = labels
        degrees = np.diff(indptr)
        degrees.setflags(write=False)
        self.degrees = degrees
        self._edge_keys = None

    # construction -----------------------------------------------------

    @classmethod
    def from_edges(cls, src, dst, labels: np.ndarray | None = None, n: int | None = None,
                   drop_isolated: bool = True) -> "Graph":
        """Build a graph from endpoint arrays, simplifying as it goes.

        Without ``labels`` the endpoints are arbitrary non-negative ids which
        are remapped to dense ids in ascending order.  With ``labels`` the
        endpoints are already dense ids into ``labels`` (``n`` nodes).
        Self-loops and duplicate or reversed edges are dropped.
        """
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        keep = src != dst
        src, dst = src[keep], dst[keep]
        if labels is None:
            ext, inv = np.unique(np.concatenate([src, dst]), return_inverse=True)
            n = ext.size
            src, dst = inv[: src.size], inv[src.size:]
            labels = ext
        else:
            labels = np.asarray(labels, dtype=np.int64)
            n = labels.size if n is None else n
        lo, hi = np.minimum(src, dst), np.maximum(src, dst)
        keys = np.unique(lo * np.int64(max(n, 1)) + hi)
        lo, hi = keys // max(n, 1), keys % max(n, 1)
        if drop_isolated:
            present = np.zeros(n, dtype=bool)
            present[lo] = True
            present[hi] = True
            if not present.all():
                remap = np.cumsum(present) - 1
                lo, hi = remap[lo], remap[hi]
                labels = labels[present]
                n = labels.size
        return cls._from_canonical(lo, hi, n, labels)

    @classmethod
    def _from_canonical(cls, lo: np.ndarray, hi: np.ndarray, n: int, labels: np.ndarray) -> "Graph":
        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return cls(indptr, cols, labels)

    # basic queries ----------------------------------------------------

    @property
    def node_count(self) -> int:
        return self.indptr.size - 1

    @property
    def edge_count(self) -> int:
        return int(self.indices.size // 2)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]: self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.node_count else 0

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    def edges(self) -> np.ndarray:
        """Each undirected edge once as an ``(m, 2)`` array with ``u < v``."""
        rows = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degrees)
        mask = rows < self.indices
        return np.column_stack([rows[mask], self.indices[mask]])

    def edge_keys(self) -> np.ndarray:
        """Sorted ``u * n + v`` keys of all edges (``u < v``), cached."""
        if self._edge_keys is None:
            e = self.edges()
            keys = e[:, 0] * np.int64(self.node_count) + e[:, 1]
            keys.setflags(write=False)
            self._edge_keys = keys
        return self._edge_keys

    def index_of(self, labels) -> np.ndarray:
        """Internal ids for external labels; raises ``KeyError`` on unknown labels."""
        labels = np.asarray(labels, dtype=np.int64)
        idx = np.searchsorted(self.labels, labels)
        idx = np.clip(idx, 0, max(self.node_count - 1, 0))
        if self.node_count == 0 or not np.array_equal(self.labels[idx], labels):
            raise KeyError("label not present in graph")
        return idx

    def to_csr(self) -> csr_matrix:
        n = self.node_count
        data = np.ones(self.indices.size, dtype=np.float64)
        return csr_matrix((data, self.indices, self.indptr), shape=(n, n))

    def induced_subgraph(self, nodes) -> "Graph":
        """Subgraph on ``nodes`` (any order) keeping every edge among them.

        Nodes are relabelled in ascending internal-id order and keep their
        external labels; isolated nodes are kept.
        """
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        remap = np.full(self.node_count, -1, dtype=np.int64)
        remap[nodes] = np.arange(nodes.size)
        starts = self.indptr[nodes]
        lens = self.degrees[nodes]
        offsets = np.repeat(starts - np.concatenate([[0], np.cumsum(lens)[:-1]]), lens)
        flat = self.indices[np.arange(lens.sum()) + offsets]
        rows = np.repeat(np.arange(nodes.size), lens)
        mapped = remap[flat]
        keep = mapped >= 0
        rows, cols = rows[keep], mapped[keep]
        indptr = np.zeros(nodes.size + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=nodes.size), out=indptr[1:])
        return Graph(indptr, cols, self.labels[nodes])

    def validate(self) -> None:
        """Raise ``AssertionError`` if the simple-undirected invariants fail."""
        n = self.node_count
        assert self.indptr[0] == 0 and self.indptr[-1] == self.indices.size
        rows = np.repeat(np.arange(n, dtype=np.int64), self.degrees)
        assert not np.any(rows == self.indices), "self-loop"
        keys = rows * max(n, 1) + self.indices
        assert np.all(np.diff(keys) > 0), "adjacency not sorted or has duplicates"
        rev = np.sort(self.indices * max(n, 1) + rows)
        assert np.array_equal(rev, keys), "asymmetric adjacency"
        assert np.all(np.diff(self.labels) > 0), "labels must be strictly increasing"

    def __repr__(self) -> str:
        return f"Graph(nodes={self.node_count}, edges={self.edge_count})"


# ingestion ------------------------------------------------------------------


def _parse_slow(lines: list[bytes]) -> np.ndarray:
    out = []
    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith(b"#"):
            continue
        parts = stripped.split()
        text = raw.decode("utf-8", "replace").rstrip("\r\n")
        if len(parts) != 2:
            raise ParseError(lineno, text)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(lineno, text) from None
        if not (0 <= u < 2**63 and 0 <= v < 2**63):
            raise ParseError(lineno, text, "id out of range [0, 2^63-1]")
        out.append((u, v))
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def parse_edge_pairs(data: bytes) -> np.ndarray:
    """Parse SNAP-style edge-list bytes into an ``(m, 2)`` int64 array."""
    lines = data.splitlines()
    body = [ln for ln in lines if ln.strip() and not ln.lstrip().startswith(b"#")]
    tokens = b" ".join(body).split()
    if len(tokens) == 2 * len(body):
        try:
            arr = np.array([int(t) for t in tokens], dtype=np.int64)
        except (ValueError, OverflowError):
            arr = None
        if arr is not None and (arr.size == 0 or arr.min() >= 0):
            return arr.reshape(-1, 2)
    # something is off; re-parse line by line to report where
    return _parse_slow(lines)


def load_edge_list(stream: BinaryIO | bytes) -> Graph:
    """Read a whitespace-separated edge list and simplify it.

    Comment lines start with ``#``.  Self-loops, duplicate and reversed
    edges, and nodes left without edges are removed; the external ids are
    kept in ``Graph.labels``.
    """
    data = stream if isinstance(stream, (bytes, bytearray)) else stream.read()
    if isinstance(data, str):
        data = data.encode()
    pairs = parse_edge_pairs(bytes(data))
    g = Graph.from_edges(pairs[:, 0], pairs[:, 1])
    if g.edge_count == 0:
        raise EmptyGraphError("graph is empty after removing self-loops and isolated nodes")
    return g


def read_edge_list(path: str | Path) -> Graph:
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rb") as fh:
        return load_edge_list(fh)


def write_edge_list(g: Graph, stream: BinaryIO | io.TextIOBase) -> None:
    """Write each edge once, as external labels, one ``u<TAB>v`` per line."""
    e = g.edges()
    lab = g.labels[e] if e.size else e
    text = "".join(f"{u}\t{v}\n" for u, v in lab.tolist())
    if isinstance(stream, io.TextIOBase):
        stream.write(text)
    else:
        stream.write(text.encode())


# generators -----------------------------------------------------------------


def generate_ba(n: int, m: int, seed=None) -> Graph:
    """Barabási-Albert graph grown from a clique on ``m + 1`` nodes.

    Every new node attaches to ``m`` distinct existing nodes chosen with
    probability proportional to their current degree.
    """
    if m < 1 or n <= m:
        raise ParameterError(f"need n > m >= 1, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    clique = [(i, j) for i in range(m + 1) for j in range(i + 1, m + 1)]
    n_edges = len(clique) + (n - m - 1) * m
    src = np.empty(n_edges, dtype=np.int64)
    dst = np.empty(n_edges, dtype=np.int64)
    # every endpoint occurrence; a uniform pick from it is degree-proportional
    ends = np.empty(2 * n_edges, dtype=np.int64)
    e = len(clique)
    if clique:
        src[:e], dst[:e] = zip(*clique)
    ends[:e] = src[:e]
    ends[e: 2 * e] = dst[:e]
    filled = 2 * e
    for new in range(m + 1, n):
        targets: list[int] = []
        while len(targets) < m:
            for t in ends[rng.integers(0, filled, size=2 * m)].tolist():
                if t not in targets:
                    targets.append(t)
                    if len(targets) == m:
                        break
        src[e: e + m] = new
        dst[e: e + m] = targets
        ends[filled: filled + m] = new
        ends[filled + m: filled + 2 * m] = targets
        filled += 2 * m
        e += m
    return Graph.from_edges(src, dst, labels=np.arange(n), drop_isolated=False)


def generate_ba_mixed(n: int, m_max: int, seed=None) -> Graph:
    """Preferential attachment where each new node brings 1..``m_max`` edges.

    The per-node edge count is uniform on ``1..m_max``, so low-degree nodes
    exist at every degree from 1 up, as in crawled real-world networks.
    Growth starts from a single edge.
    """
    if m_max < 1 or n < 2:
        raise ParameterError("need n >= 2 and m_max >= 1")
    rng = np.random.default_rng(seed)
    src, dst = [0], [1]
    ends = [0, 1]
    for new in range(2, n):
        m = min(int(rng.integers(1, m_max + 1)), new)
        targets: list[int] = []
        while len(targets) < m:
            t = ends[int(rng.integers(len(ends)))]
            if t not in targets:
                targets.append(t)
        for t in targets:
            src.append(new)
            dst.append(t)
            ends += (new, t)
    return Graph.from_edges(np.array(src), np.array(dst), labels=np.arange(n), drop_isolated=False)


def generate_gnp(n: int, p: float, seed=None) -> Graph:
    """Erdős-Rényi G(n, p); nodes left isolated are dropped."""
    if n < 2 or not 0 < p <= 1:
        raise ParameterError("need n >= 2 and 0 < p <= 1")
    rng = np.random.default_rng(seed)
    src, dst = [], []
    for i in range(n - 1):
        hit = np.flatnonzero(rng.random(n - i - 1) < p) + i + 1
        src.append(np.full(hit.size, i))
        dst.append(hit)
    g = Graph.from_edges(np.concatenate(src), np.concatenate(dst), labels=np.arange(n))
    if g.edge_count == 0:
        raise EmptyGraphError("G(n, p) draw produced no edges")
    return g


def from_edge_iter(pairs: Iterable[tuple[int, int]]) -> Graph:
    """Small-graph convenience wrapper around :meth:`Graph.from_edges`."""
    arr = np.array(list(pairs), dtype=np.int64).reshape(-1, 2)
    return Graph.from_edges(arr[:, 0], arr[:, 1])


# structure ------------------------------------------------------------------


@dataclass(frozen=True)
class CorePeripheryStats:
    dt: float
    core_node_frac: float
    periphery_node_frac: float
    core_edge_frac: float
    vertical_edge_frac: float
    periphery_edge_frac: float
    r_per: float
    core_edge_density: float
    core_nodes: int
    core_edges: int


def partition_stats(g: Graph, dt: float) -> CorePeripheryStats:
    """Split nodes at degree ``dt`` (core iff degree > dt) and count edge classes.

    ``r_per`` is the share of periphery nodes with at least one core neighbour.
    """
    if dt < 0:
        raise ParameterError("dt must be >= 0")
    n = g.node_count
    core = g.degrees > dt
    n_core = int(core.sum())
    e = g.edges()
    m = e.shape[0]
    both = core[e[:, 0]].astype(np.int8) + core[e[:, 1]]
    core_edges = int((both == 2).sum())
    vertical = int((both == 1).sum())
    periph_edges = m - core_edges - vertical
    rows = np.repeat(np.arange(n, dtype=np.int64), g.degrees)
    touches = np.bincount(rows[core[g.indices]], minlength=n) > 0
    n_per = n - n_core
    reach = int((touches & ~core).sum())
    return CorePeripheryStats(
        dt=dt,
        core_node_frac=n_core / n,
        periphery_node_frac=n_per / n,
        core_edge_frac=core_edges / m,
        vertical_edge_frac=vertical / m,
        periphery_edge_frac=periph_edges / m,
        r_per=reach / n_per if n_per else 0.0,
        core_edge_density=core_edges / n_core if n_core else 0.0,
        core_nodes=n_core,
        core_edges=core_edges,
    )


def component_labels(g: Graph) -> np.ndarray:
    _, lab = connected_components(g.to_csr(), directed=False)
    return lab


def max_connected_component(g: Graph) -> Graph:
    """Largest connected component; ties go to the one holding the smallest id."""
    if g.node_count == 0:
        return g
    lab = component_labels(g)
    sizes = np.bincount(lab)
    _, first = np.unique(lab, return_index=True)  # smallest node id per component
    best = min(np.flatnonzero(sizes == sizes.max()), key=lambda c: first[c])
    nodes = np.flatnonzero(lab == best)
    if nodes.size == g.node_count:
        return g
    return g.induced_subgraph(nodes)
