"""Graph statistics used to compare an original network with its samples.

Covers average degree, degree distribution and CCDF, clustering (local,
per-degree, average), shortest-path-length distribution and average,
RWSD (weighted spectral distribution over node count), RMD, and the
closeness / betweenness of a single node.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import MetricUndefinedError
from .graph import Graph, max_connected_component

EIGEN_ORACLE_CAP = 500


def average_degree(g: Graph) -> float:
    if g.node_count == 0:
        raise MetricUndefinedError("average degree of an empty graph")
    return 2.0 * g.edge_count / g.node_count


def degree_pmf(g: Graph) -> dict[int, float]:
    counts = np.bincount(g.degrees)
    n = g.node_count
    return {k: c / n for k, c in enumerate(counts.tolist()) if c}


def degree_ccdf(g: Graph) -> dict[int, float]:
    """F(k) = share of nodes with degree strictly greater than k, k = 0..max degree."""
    counts = np.bincount(g.degrees, minlength=g.max_degree + 1)
    above = g.node_count - np.cumsum(counts)
    return {k: a / g.node_count for k, a in enumerate(above.tolist())}


def local_clustering(g: Graph) -> np.ndarray:
    """Local clustering coefficient per node; 0 for degree < 2."""
    links = _kernels.neighbor_links(g.indptr, g.indices).astype(np.float64)
    d = g.degrees.astype(np.float64)
    pairs = d * (d - 1) / 2
    out = np.zeros(g.node_count)
    np.divide(links, pairs, out=out, where=pairs > 0)
    return out


def clustering(g: Graph) -> tuple[float, dict[int, float]]:
    """Return (ACC, C(k)) with ACC = sum_k C(k) P(k)."""
    local = local_clustering(g)
    sums = np.bincount(g.degrees, weights=local)
    counts = np.bincount(g.degrees)
    c_k = {k: float(sums[k] / counts[k]) for k in np.flatnonzero(counts).tolist()}
    p_k = degree_pmf(g)
    acc = math.fsum(c_k[k] * p_k[k] for k in c_k)
    return acc, c_k


@dataclass(frozen=True)
class PathLengths:
    apl: float
    pmf: dict[int, float]
    sources: int       # BFS sources used
    sampled: bool      # True when sources were a uniform subset


def path_lengths(g: Graph, sample_sources: int | None = None, rng=None) -> PathLengths:
    """Distance distribution over node pairs of the largest component.

    Exact by default (BFS from every node).  With ``sample_sources`` smaller
    than the component, BFS runs from that many uniformly drawn sources.
    """
    if g.node_count == 0:
        raise MetricUndefinedError("path lengths of an empty graph")
    comp = max_connected_component(g)
    n = comp.node_count
    if n < 2:
        raise MetricUndefinedError("largest component has a single node")
    if sample_sources is not None and sample_sources < n:
        rng = np.random.default_rng(rng)
        sources = np.sort(rng.choice(n, size=sample_sources, replace=False)).astype(np.int64)
        sampled = True
    else:
        sources = np.arange(n, dtype=np.int64)
        sampled = False
    hist = _kernels.distance_histogram(comp.indptr, comp.indices, sources)
    hist[0] = 0
    total = hist.sum()  # ordered pairs; every unordered pair appears twice when exact
    lengths = np.flatnonzero(hist)
    pmf = {int(l): float(hist[l] / total) for l in lengths}
    apl = float((lengths * hist[lengths]).sum() / total)
    return PathLengths(apl=apl, pmf=pmf, sources=int(sources.size), sampled=sampled)


def rwsd(g: Graph) -> float:
    """sum_i (1 - lambda_i)^4 / |V| over the normalized Laplacian spectrum.

    Computed as trace((D^-1 A)^4) / |V| from weighted closed 4-walks.
    """
    if g.node_count == 0:
        raise MetricUndefinedError("RWSD of an empty graph")
    return _kernels.closed_four_walk_weight(g.indptr, g.indices) / g.node_count


def normalized_laplacian(g: Graph) -> np.ndarray:
    n = g.node_count
    a = np.zeros((n, n))
    e = g.edges()
    a[e[:, 0], e[:, 1]] = 1.0
    a[e[:, 1], e[:, 0]] = 1.0
    d = a.sum(axis=1)
    inv = np.zeros(n)
    np.divide(1.0, np.sqrt(d), out=inv, where=d > 0)
    lap = np.diag((d > 0).astype(float)) - inv[:, None] * a * inv[None, :]
    return lap


def rwsd_eigen_oracle(g: Graph, cap: int = EIGEN_ORACLE_CAP) -> float:
    """Dense-eigendecomposition RWSD, for cross-checking :func:`rwsd`."""
    if g.node_count > cap:
        raise MetricUndefinedError(f"eigen oracle limited to {cap} nodes, got {g.node_count}")
    lam = np.linalg.eigvalsh(normalized_laplacian(g))
    return float(np.sum((1.0 - lam) ** 4) / g.node_count)


def max_degree_node(g: Graph) -> int:
    return int(np.argmax(g.degrees))  # argmax keeps the first, i.e. smallest id


def rmd(g: Graph) -> float:
    return g.max_degree / g.node_count


def degree_rank_table(g: Graph) -> list[tuple[int, int, int]]:
    """(rank, degree, number of nodes with that degree), highest degree first."""
    degs, counts = np.unique(g.degrees, return_counts=True)
    rows = zip(degs[::-1].tolist(), counts[::-1].tolist())
    return [(i, d, c) for i, (d, c) in enumerate(rows, start=1)]


def closeness(g: Graph, v: int) -> float:
    """(n_c - 1) / L_c within the component of ``v``."""
    dist = _kernels.bfs_distances(g.indptr, g.indices, int(v))
    reach = dist[dist > 0]
    if reach.size == 0:
        raise MetricUndefinedError(f"node {v} is isolated")
    return reach.size / float(reach.sum())


def betweenness(g: Graph, v: int) -> float:
    """Share of shortest paths through ``v``, normalised by (n-1)(n-2)/2 pairs."""
    n = g.node_count
    if n < 3:
        raise MetricUndefinedError("betweenness needs at least 3 nodes")
    total = _kernels.brandes_dependency(g.indptr, g.indices, int(v))
    # every unordered pair was counted from both ends
    return total / ((n - 1) * (n - 2))


@dataclass(frozen=True)
class MetricsReport:
    ad: float
    acc: float
    apl: float
    rwsd: float
    rmd: float
    cc_vmax: float
    bc_vmax: float
    vmax: int | None   # external label of the reference node


def metrics_report(g: Graph, vmax_label: int | None = None, heavy: bool = True,
                   apl_sources: int | None = None, bc_max_nodes: int | None = None,
                   rng=None, light: tuple[str, ...] = ("ad", "acc", "rwsd", "rmd", "cc")) -> MetricsReport:
    """All scalar statistics of ``g``.

    ``vmax_label`` names the reference node for CC/BC (by external label);
    by default it is the max-degree node of ``g`` itself.  Statistics that
    are skipped or undefined come back as NaN.
    """
    nan = float("nan")
    if vmax_label is None:
        vmax_label = int(g.labels[max_degree_node(g)])
    try:
        v = int(g.index_of([vmax_label])[0])
    except KeyError:
        v = None
    acc = clustering(g)[0] if "acc" in light else nan
    cc = nan
    if "cc" in light and v is not None:
        try:
            cc = closeness(g, v)
        except MetricUndefinedError:
            pass
    apl = bc = nan
    if heavy:
        try:
            apl = path_lengths(g, apl_sources, rng).apl
        except MetricUndefinedError:
            pass
        if v is not None and g.node_count >= 3 and (bc_max_nodes is None or g.node_count <= bc_max_nodes):
            bc = betweenness(g, v)
    return MetricsReport(
        ad=average_degree(g) if "ad" in light else nan,
        acc=acc,
        apl=apl,
        rwsd=rwsd(g) if "rwsd" in light else nan,
        rmd=rmd(g) if "rmd" in light else nan,
        cc_vmax=cc,
        bc_vmax=bc,
        vmax=vmax_label,
    )


@dataclass(frozen=True)
class DistributionSet:
    degree_pmf: dict[int, float]
    ccdf: dict[int, float]
    clustering_by_degree: dict[int, float]
    path_length_pmf: dict[int, float]
    degree_rank: list[tuple[int, int, int]]


def distributions(g: Graph, apl_sources: int | None = None, rng=None) -> DistributionSet:
    return DistributionSet(
        degree_pmf=degree_pmf(g),
        ccdf=degree_ccdf(g),
        clustering_by_degree=clustering(g)[1],
        path_length_pmf=path_lengths(g, apl_sources, rng).pmf,
        degree_rank=degree_rank_table(g),
    )


def _write_rows(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])


def export_distributions(dist: DistributionSet, out_dir: str | Path) -> list[Path]:
    """Write ccdf.csv, clustering.csv, pathlen.csv and degrank.csv into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = [
        (out / "ccdf.csv", ["k", "F"], sorted(dist.ccdf.items())),
        (out / "clustering.csv", ["k", "C"], sorted(dist.clustering_by_degree.items())),
        (out / "pathlen.csv", ["l", "mu"], sorted(dist.path_length_pmf.items())),
        (out / "degrank.csv", ["rank", "degree", "count"], dist.degree_rank),
    ]
    for path, header, rows in files:
        _write_rows(path, header, rows)
    return [f[0] for f in files]
