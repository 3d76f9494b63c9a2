"""Traversal samplers (FF, SRW, NBRW, RD) and their periphery-restricted form.

Every sampler is written once against a small crawl object that supplies
seeds and neighbour lists.  The plain crawl exposes the whole graph; the
periphery crawl hides every neighbour whose degree exceeds the threshold
and remembers those hidden core neighbours for the later core stage.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

from .access import UnknownNetworkView
from .errors import ParameterError, PeripheryShortfallError, SampleTooSmallError
from .graph import Graph

METHODS = ("FF", "SRW", "NBRW", "RD")


@dataclass(frozen=True)
class TraversalConfig:
    method: str = "FF"
    ff_burn_prob: float = 0.3
    rd_seed_count: int | None = None  # None: max(1, floor(0.001 * node_count))
    rd_top_k: int = 1
    # a walk that finds no new node for this many steps restarts elsewhere
    stall_steps: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "method", self.method.upper())
        if self.method not in METHODS:
            raise ParameterError(f"unknown traversal method {self.method!r}; choose from {METHODS}")
        if not 0 < self.ff_burn_prob < 1:
            raise ParameterError("ff_burn_prob must be in (0, 1)")
        if self.rd_seed_count is not None and self.rd_seed_count < 1:
            raise ParameterError("rd_seed_count must be >= 1")
        if self.rd_top_k < 1 or self.stall_steps < 1:
            raise ParameterError("rd_top_k and stall_steps must be >= 1")

    def seed_count(self, node_count: int) -> int:
        if self.rd_seed_count is not None:
            return self.rd_seed_count
        return max(1, math.floor(0.001 * node_count))


class _Crawl:
    """Whole-graph access: seeds are uniform draws, neighbours are N(v)."""

    def __init__(self, view: UnknownNetworkView, rng: np.random.Generator):
        self.view = view
        self.rng = rng
        self._draws = view.draw_stream(rng)
        self._adj: dict[int, np.ndarray] = {}
        self._deg: dict[int, np.ndarray] = {}

    def eligible(self, w: int) -> bool:
        return True

    def next_seed(self, taken) -> int | None:
        for w in self._draws:
            if w not in taken and self.eligible(w):
                return w
        return None

    def expand(self, v: int) -> np.ndarray:
        nb = self._adj.get(v)
        if nb is None:
            nb = self._adj[v] = self.view.neighbors(v)
        return nb

    def neighbor_degrees(self, v: int) -> np.ndarray:
        d = self._deg.get(v)
        if d is None:
            d = self._deg[v] = self.view.degrees(self.expand(v))
        return d


class _PeripheryCrawl(_Crawl):
    """Neighbour sets shrink to {u : d(u) <= dt}; the rest is kept per node."""

    def __init__(self, view: UnknownNetworkView, rng: np.random.Generator, dt: float):
        super().__init__(view, rng)
        self.dt = dt
        self.core: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def eligible(self, w: int) -> bool:
        return self.view.degree(w) <= self.dt

    def expand(self, v: int) -> np.ndarray:
        nb = self._adj.get(v)
        if nb is None:
            full = self.view.neighbors(v)
            d = self.view.degrees(full)
            per = d <= self.dt
            nb = self._adj[v] = full[per]
            self._deg[v] = d[per]
            cid, cdeg = full[~per], d[~per]
            order = np.lexsort((cid, -cdeg))  # degree descending, then smaller id
            self.core[v] = (cid[order], cdeg[order])
        return nb


# samplers --------------------------------------------------------------------
# Each returns (visited nodes in visit order, traversal edges or None, exhausted)


def _forest_fire(crawl: _Crawl, n: int, p: float, rng: np.random.Generator):
    sampled: dict[int, None] = {}
    edges: list[tuple[int, int]] = []
    queue: deque[int] = deque()
    queued: set[int] = set()
    w = crawl.next_seed(sampled)
    if w is None:
        return [], edges, True
    queue.append(w)
    queued.add(w)
    while len(sampled) < n:
        if not queue:
            w = crawl.next_seed(sampled)
            if w is None:
                return list(sampled), edges, True
            queue.append(w)
            queued.add(w)
        v = queue.popleft()
        queued.discard(v)
        nbrs = crawl.expand(v).tolist()
        edges.extend((v, u) for u in nbrs if u in sampled)
        sampled[v] = None
        if len(sampled) + len(queue) < n:
            eligible = [u for u in nbrs if u not in sampled and u not in queued]
            burn = min(int(rng.geometric(p)) - 1, len(eligible))  # failures before success
            if burn > 0:
                for i in rng.permutation(len(eligible))[:burn].tolist():
                    queue.append(eligible[i])
                    queued.add(eligible[i])
    return list(sampled), edges, False


def _random_walk(crawl: _Crawl, n: int, rng: np.random.Generator, stall_steps: int,
                 backtrack: bool):
    visited: dict[int, None] = {}
    cur = crawl.next_seed(visited)
    if cur is None:
        return [], None, True
    visited[cur] = None
    prev, idle = -1, 0
    while len(visited) < n:
        nb = crawl.expand(cur)
        if nb.size == 0 or idle >= stall_steps:
            cur = crawl.next_seed(visited)
            if cur is None:
                return list(visited), None, True
            visited[cur] = None
            prev, idle = -1, 0
            continue
        if not backtrack and prev >= 0 and nb.size > 1:
            i = int(rng.integers(nb.size - 1))
            if i >= int(np.searchsorted(nb, prev)):
                i += 1
        else:
            i = int(rng.integers(nb.size))
        prev, cur = cur, int(nb[i])
        if cur in visited:
            idle += 1
        else:
            visited[cur] = None
            idle = 0
    return list(visited), None, False


def _rank_degree(crawl: _Crawl, n: int, seed_count: int, top_k: int):
    visited: dict[int, None] = {}

    def reseed() -> list[int]:
        seeds = []
        while len(seeds) < seed_count and len(visited) < n:
            w = crawl.next_seed(visited)
            if w is None:
                break
            visited[w] = None
            seeds.append(w)
        return seeds

    seeds = reseed()
    while len(visited) < n:
        if not seeds:
            seeds = reseed()
            if not seeds:
                return list(visited), None, True
            continue
        nxt: list[int] = []
        for s in seeds:
            nb = crawl.expand(s)
            d = crawl.neighbor_degrees(s)
            fresh = np.fromiter((u not in visited for u in nb.tolist()), dtype=bool, count=nb.size)
            cand, cdeg = nb[fresh], d[fresh]
            for u in cand[np.lexsort((cand, -cdeg))[:top_k]].tolist():
                visited[u] = None
                nxt.append(u)
                if len(visited) >= n:
                    return list(visited), None, False
        seeds = nxt
    return list(visited), None, False


def _run(crawl: _Crawl, n: int, cfg: TraversalConfig, rng: np.random.Generator):
    if cfg.method == "FF":
        return _forest_fire(crawl, n, cfg.ff_burn_prob, rng)
    if cfg.method == "SRW":
        return _random_walk(crawl, n, rng, cfg.stall_steps, backtrack=True)
    if cfg.method == "NBRW":
        return _random_walk(crawl, n, rng, cfg.stall_steps, backtrack=False)
    return _rank_degree(crawl, n, cfg.seed_count(crawl.view.node_count), cfg.rd_top_k)


# public baselines -------------------------------------------------------------


def _baseline(view: UnknownNetworkView, n_target: int, cfg: TraversalConfig, rng) -> Graph:
    if not 1 <= n_target <= view.node_count:
        raise ParameterError(f"n_target must be in [1, {view.node_count}], got {n_target}")
    rng = np.random.default_rng(rng)
    with view.phase(cfg.method.lower()):
        visited, _, _ = _run(_Crawl(view, rng), n_target, cfg, rng)
        return view.induced_subgraph(visited)


def forest_fire(view: UnknownNetworkView, n_target: int, cfg: TraversalConfig | None = None,
                rng=None) -> Graph:
    cfg = cfg or TraversalConfig("FF")
    return _baseline(view, n_target, replace(cfg, method="FF"), rng)


def simple_random_walk(view: UnknownNetworkView, n_target: int, rng=None,
                       cfg: TraversalConfig | None = None) -> Graph:
    cfg = cfg or TraversalConfig("SRW")
    return _baseline(view, n_target, replace(cfg, method="SRW"), rng)


def non_backtracking_walk(view: UnknownNetworkView, n_target: int, rng=None,
                          cfg: TraversalConfig | None = None) -> Graph:
    cfg = cfg or TraversalConfig("NBRW")
    return _baseline(view, n_target, replace(cfg, method="NBRW"), rng)


def rank_degree(view: UnknownNetworkView, n_target: int, cfg: TraversalConfig | None = None,
                rng=None) -> Graph:
    cfg = cfg or TraversalConfig("RD")
    return _baseline(view, n_target, replace(cfg, method="RD"), rng)


def sample_baseline(view: UnknownNetworkView, cfg: TraversalConfig, n_target: int, rng=None) -> Graph:
    return _baseline(view, n_target, cfg, rng)


# periphery-restricted wrapper --------------------------------------------------


@dataclass
class PeripheryResult:
    g_per: Graph
    nodes: np.ndarray          # V_sub^per, original internal ids, ascending
    edges: np.ndarray          # E_sub^per as (m, 2) original ids, u < v
    core_neighbors: dict[int, tuple[np.ndarray, np.ndarray]] = field(repr=False)
    dt: float
    n_target: int
    shortfall: bool

    def core_list(self, v: int) -> list[tuple[int, int]]:
        ids, degs = self.core_neighbors[v]
        return list(zip(ids.tolist(), degs.tolist()))


def periphery_sampling(view: UnknownNetworkView, t_s: TraversalConfig, dt: float,
                       r_slsr: float, rng=None) -> PeripheryResult:
    """Run ``t_s`` with every neighbour set cut down to degree <= ``dt``.

    Targets ``floor(node_count * r_slsr)`` periphery nodes.  If the crawl
    runs out of periphery to draw seeds from, everything reached is
    returned with ``shortfall`` set; an empty result raises.
    """
    if not 0 < r_slsr <= 1:
        raise ParameterError(f"r_slsr must be in (0, 1], got {r_slsr}")
    n = math.floor(view.node_count * r_slsr)
    if n < 1:
        raise SampleTooSmallError(f"floor({view.node_count} * {r_slsr}) = 0 periphery nodes")
    rng = np.random.default_rng(rng)
    crawl = _PeripheryCrawl(view, rng, dt)
    with view.phase("periphery"):
        visited, traversal_edges, exhausted = _run(crawl, n, t_s, rng)
        if not visited:
            raise PeripheryShortfallError(f"no node with degree <= {dt} found")
        for v in visited:  # walks may stop on a node they never expanded
            crawl.expand(v)
    nodes = np.array(sorted(visited), dtype=np.int64)
    members = set(visited)
    # induction pass: every original edge between two sampled periphery nodes
    pairs = {(v, u) if v < u else (u, v)
             for v in visited for u in crawl.expand(v).tolist() if u in members}
    if traversal_edges:
        pairs.update((v, u) if v < u else (u, v) for v, u in traversal_edges)
    edges = np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)
    return PeripheryResult(
        g_per=view.subgraph_from_edges(nodes, edges),
        nodes=nodes,
        edges=edges,
        core_neighbors={v: crawl.core[v] for v in nodes.tolist()},
        dt=dt,
        n_target=n,
        shortfall=exhausted or len(visited) < n,
    )
