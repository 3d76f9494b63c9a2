"""The SLSR sampler: estimate, crawl the periphery, then add back the core.

After the periphery crawl every sampled periphery node ``v`` knows its core
neighbours, sorted by degree.  For a retention percentage ``x`` each ``v``
keeps the top ``ceil(t * x / 100)`` of its ``t`` core neighbours; the kept
core nodes, the edges from ``v`` to them, and every original edge among the
kept core nodes are added to the periphery sample.  ``x`` is chosen by
bisection so that the average degree of the result tracks the estimated
average degree of the original graph.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .access import UnknownNetworkView
from .errors import ParameterError, PeripheryShortfallError
from .estimator import DEFAULT_R_RN, EstimatedParams, estimate_params
from .graph import Graph
from .traversal import PeripheryResult, TraversalConfig, periphery_sampling

MAX_PROBES = 7  # ceil(log2(100))


@dataclass(frozen=True)
class SlsrConfig:
    r_slsr: float
    r_rn: float = DEFAULT_R_RN
    t_s: TraversalConfig = field(default_factory=TraversalConfig)
    # "sign": move the bracket by comparing the probe's AD with the target.
    # "distance": move it by comparing the probe's distance with the best so far.
    bisection: str = "sign"

    def __post_init__(self):
        if not 0 < self.r_slsr <= 1 or not 0 < self.r_rn <= 1:
            raise ParameterError("sampling rates must be in (0, 1]")
        if self.bisection not in ("sign", "distance"):
            raise ParameterError(f"unknown bisection update {self.bisection!r}")


@dataclass
class Assembly:
    x: int
    ad: float
    core_nodes: np.ndarray       # V_sub^cor
    vertical_edges: np.ndarray   # (periphery v, core u)
    core_edges: np.ndarray       # (u, w), u < w, both core
    node_count: int
    edge_count: int


@dataclass
class BisectionState:
    x_min: int = 1
    x_max: int = 100
    x_opt: int = 0
    min_distance: float = math.inf
    history: list[tuple[int, float]] = field(default_factory=list)


class CoreAssembler:
    """Builds the sampled core for any ``x``; core adjacency is read once per node."""

    def __init__(self, per: PeripheryResult, view: UnknownNetworkView):
        self.per = per
        self.view = view
        owners, cores, ranks, counts = [], [], [], []
        for v in per.nodes.tolist():
            ids = per.core_neighbors[v][0]
            owners.append(np.full(ids.size, v, dtype=np.int64))
            cores.append(ids)
            ranks.append(np.arange(ids.size))
            counts.append(ids.size)
        empty = np.empty(0, dtype=np.int64)
        self._owner = np.concatenate(owners) if owners else empty
        self._core = np.concatenate(cores) if cores else empty
        self._rank = np.concatenate(ranks) if ranks else empty
        self._t = np.repeat(np.array(counts, dtype=np.int64), counts)
        self._adj: dict[int, np.ndarray] = {}
        self._mark = np.zeros(view.node_count, dtype=bool)

    @property
    def fetched(self) -> set[int]:
        """Core nodes whose neighbour lists have been read so far."""
        return set(self._adj)

    def keep_count(self, t, x: int):
        # ceil(t * x / 100) in exact integer arithmetic
        return (t * x + 99) // 100

    def assemble(self, x: int) -> Assembly:
        if not 1 <= x <= 100:
            raise ParameterError("x must be in [1, 100]")
        kept = self._rank < self.keep_count(self._t, x)
        vertical = np.column_stack([self._owner[kept], self._core[kept]])
        core_nodes = np.unique(self._core[kept])
        core_edges = self._core_edges(core_nodes)
        n_nodes = self.per.nodes.size + core_nodes.size
        n_edges = self.per.edges.shape[0] + vertical.shape[0] + core_edges.shape[0]
        return Assembly(x=x, ad=2.0 * n_edges / n_nodes, core_nodes=core_nodes,
                        vertical_edges=vertical, core_edges=core_edges,
                        node_count=n_nodes, edge_count=n_edges)

    def _core_edges(self, core_nodes: np.ndarray) -> np.ndarray:
        if core_nodes.size == 0:
            return np.empty((0, 2), dtype=np.int64)
        with self.view.phase("core"):
            lists = []
            for u in core_nodes.tolist():
                nb = self._adj.get(u)
                if nb is None:
                    nb = self._adj[u] = self.view.neighbors(u)
                lists.append(nb)
        src = np.repeat(core_nodes, [nb.size for nb in lists])
        dst = np.concatenate(lists)
        self._mark[core_nodes] = True
        keep = self._mark[dst] & (src < dst)
        self._mark[core_nodes] = False
        return np.column_stack([src[keep], dst[keep]])


def assemble(per: PeripheryResult, x: int, view: UnknownNetworkView) -> Assembly:
    return CoreAssembler(per, view).assemble(x)


def bisect_x(per: PeripheryResult, view: UnknownNetworkView, target_ad: float,
             assembler: CoreAssembler | None = None, update: str = "sign"):
    """Pick the retention percentage whose subgraph AD is closest to ``target_ad``.

    Returns ``(x_opt, assembly at x_opt, BisectionState)``.  Only the probed
    ``x`` values are candidates; the bracket ``[1, 100]`` endpoints are never
    probed themselves.
    """
    if not target_ad > 0:
        raise ParameterError("target_ad must be positive")
    assembler = assembler or CoreAssembler(per, view)
    state = BisectionState()
    best: Assembly | None = None
    while state.x_max - state.x_min > 1:
        x = math.floor((state.x_min + state.x_max) / 2 + 0.5)
        probe = assembler.assemble(x)
        distance = abs(probe.ad - target_ad)
        state.history.append((x, probe.ad))
        if update == "sign":
            moves_up = probe.ad < target_ad
        else:
            moves_up = distance < state.min_distance
        if moves_up:
            state.x_min = x
        else:
            state.x_max = x
        # ties go to the later probe, which sits nearer the crossing point
        if distance <= state.min_distance:
            state.x_opt, state.min_distance, best = x, distance, probe
    return state.x_opt, best, state


@dataclass
class SlsrOutput:
    subgraph: Graph
    x_percent: int | None
    params: EstimatedParams
    periphery: PeripheryResult
    v_per: np.ndarray
    v_cor: np.ndarray
    e_per: np.ndarray
    e_cor: np.ndarray
    e_ver: np.ndarray
    bisection: BisectionState | None
    core_probed: set[int]
    fallback: bool = False

    @property
    def nodes(self) -> np.ndarray:
        """All sampled nodes as original internal ids, ascending."""
        return np.union1d(self.v_per, self.v_cor)


def slsr_sample(view: UnknownNetworkView, cfg: SlsrConfig, rng=None) -> SlsrOutput:
    rng = np.random.default_rng(rng)
    params = estimate_params(view, cfg.r_rn, rng)
    try:
        per = periphery_sampling(view, cfg.t_s, params.dt, cfg.r_slsr, rng)
        fallback = per.shortfall
    except PeripheryShortfallError:
        fallback = True
    if fallback:
        # the periphery cannot carry the sample; crawl the whole graph instead
        per = periphery_sampling(view, cfg.t_s, math.inf, cfg.r_slsr, rng)
        empty = np.empty((0, 2), dtype=np.int64)
        return SlsrOutput(subgraph=per.g_per, x_percent=None, params=params, periphery=per,
                          v_per=per.nodes, v_cor=np.empty(0, dtype=np.int64), e_per=per.edges,
                          e_cor=empty, e_ver=empty, bisection=None, core_probed=set(),
                          fallback=True)

    assembler = CoreAssembler(per, view)
    x_opt, asm, state = bisect_x(per, view, params.ad, assembler, cfg.bisection)
    nodes = np.union1d(per.nodes, asm.core_nodes)
    edges = np.concatenate([per.edges, asm.vertical_edges, asm.core_edges])
    return SlsrOutput(
        subgraph=view.subgraph_from_edges(nodes, edges),
        x_percent=x_opt,
        params=params,
        periphery=per,
        v_per=per.nodes,
        v_cor=asm.core_nodes,
        e_per=per.edges,
        e_cor=asm.core_edges,
        e_ver=asm.vertical_edges,
        bisection=state,
        core_probed=assembler.fetched,
    )
