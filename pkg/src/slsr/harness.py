"""Experiment runner: repeated sampling, node-count matching, summary tables.

Every realization draws its randomness from a seed derived only from the
master seed, the method name and the realization index, so reports are
byte-identical for a fixed configuration regardless of the worker count.
Wall-clock timings go to a separate ``runtime.csv`` that is not covered by
that guarantee.
"""
from __future__ import annotations

import configparser
import csv
import dataclasses
import hashlib
import json
import math
import statistics
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import metrics as M
from .access import UnknownNetworkView
from .errors import DataError, InvariantViolation, ParameterError
from .estimator import estimate_params
from .graph import (CorePeripheryStats, Graph, generate_ba, generate_ba_mixed, generate_gnp,
                    partition_stats, read_edge_list, write_edge_list)
from .pipeline import SlsrConfig, SlsrOutput, slsr_sample
from .traversal import METHODS, TraversalConfig, sample_baseline

ALL_METHODS = ("SLSR",) + METHODS
# row order of the summary table
ROW_ORDER = ("original", "SLSR", "FF", "RD", "SRW", "NBRW")
LIGHT_STATS = ("ad", "acc", "rwsd", "rmd", "cc")
HEAVY_STATS = ("apl", "bc")
STAT_COLUMNS = ("node_count", "edge_count", "ad", "acc", "apl", "rwsd", "rmd", "cc_vmax", "bc_vmax")


# datasets ---------------------------------------------------------------------


_GENERATORS = {
    "ba": (generate_ba, (int, int)),
    "bamix": (generate_ba_mixed, (int, int)),
    "gnp": (generate_gnp, (int, float)),
}


def load_dataset(spec: str) -> tuple[Graph, str]:
    """Load a dataset and return ``(graph, sha256)``.

    ``spec`` is an edge-list path (optionally ``.gz``) or a synthetic graph
    written as ``ba:N:M:SEED``, ``bamix:N:M:SEED`` or ``gnp:N:P:SEED``.  For
    synthetic graphs the checksum covers the spec string.
    """
    kind, _, rest = spec.partition(":")
    if kind in _GENERATORS and rest:
        gen, types = _GENERATORS[kind]
        parts = rest.split(":")
        if len(parts) != 3:
            raise ParameterError(f"synthetic dataset needs {kind}:N:PARAM:SEED, got {spec!r}")
        try:
            args = [t(p) for t, p in zip(types, parts[:2])] + [int(parts[2])]
        except ValueError as exc:
            raise ParameterError(f"bad synthetic dataset {spec!r}: {exc}") from None
        return gen(*args), hashlib.sha256(spec.encode()).hexdigest()
    path = Path(spec)
    if not path.is_file():
        raise DataError(f"dataset not found: {spec}")
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return read_edge_list(path), digest.hexdigest()


# configuration ----------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str
    methods: tuple[str, ...] = ALL_METHODS
    r_slsr: float = 0.1
    r_rn: float = 0.35
    realizations: int = 100
    heavy_realizations: int = 10
    seed: int = 0
    metrics: tuple[str, ...] = LIGHT_STATS + HEAVY_STATS
    t_s: str = "FF"
    ff_burn_prob: float = 0.3
    bisection: str = "sign"
    # baselines only: used when SLSR is not among the methods
    n_target: int | None = None
    # path lengths use sampled BFS sources above this many nodes
    apl_exact_max_nodes: int = 20000
    apl_sources: int = 1000
    # betweenness is skipped (NaN) above this many nodes
    bc_max_nodes: int = 20000
    error: str = "std"   # "std": sample deviation, "sem": deviation / sqrt(n)
    check_invariants: bool = True
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        methods = tuple(m.upper() for m in self.methods)
        object.__setattr__(self, "methods", methods)
        bad = [m for m in methods if m not in ALL_METHODS]
        if bad or not methods:
            raise ParameterError(f"unknown method(s) {bad}; choose from {ALL_METHODS}")
        unknown = set(self.metrics) - set(LIGHT_STATS + HEAVY_STATS)
        if unknown:
            raise ParameterError(f"unknown metric toggle(s) {sorted(unknown)}")
        if self.realizations < 1:
            raise ParameterError("realizations must be >= 1")
        if not 0 <= self.heavy_realizations <= self.realizations:
            raise ParameterError("heavy_realizations must be in [0, realizations]")
        if self.error not in ("std", "sem"):
            raise ParameterError("error must be 'std' or 'sem'")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")
        self.slsr_config()  # validates rates and traversal parameters

    def slsr_config(self) -> SlsrConfig:
        return SlsrConfig(r_slsr=self.r_slsr, r_rn=self.r_rn, bisection=self.bisection,
                          t_s=TraversalConfig(self.t_s, ff_burn_prob=self.ff_burn_prob))

    def traversal(self, method: str) -> TraversalConfig:
        return TraversalConfig(method, ff_burn_prob=self.ff_burn_prob)

    def fingerprint(self) -> dict:
        """Fields that influence results (not where or how fast they are produced)."""
        d = dataclasses.asdict(self)
        for k in ("workers", "out"):
            d.pop(k)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}

    def config_hash(self) -> str:
        blob = json.dumps(self.fingerprint(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


_CONFIG_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines (``#`` comments) into config field values.

    Keys may use dashes or underscores.  List-valued keys (``methods``,
    ``metrics``) take comma-separated values.
    """
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"),
                                   inline_comment_prefixes=("#",))
    try:
        cp.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ParameterError(f"bad config file: {exc}") from None
    out = {}
    for key, raw in cp["run"].items():
        name = key.replace("-", "_")
        if name not in _CONFIG_TYPES:
            raise ParameterError(f"unknown config key {key!r}")
        out[name] = coerce_field(name, raw)
    return out


def coerce_field(name: str, raw):
    """Convert a string setting to the type of the config field ``name``."""
    if not isinstance(raw, str):
        return raw
    kind = _CONFIG_TYPES[name]
    raw = raw.strip()
    try:
        if kind.startswith("tuple"):
            return tuple(s.strip() for s in raw.split(",") if s.strip())
        if kind.startswith("bool"):
            if raw.lower() not in ("1", "0", "true", "false", "yes", "no"):
                raise ValueError(raw)
            return raw.lower() in ("1", "true", "yes")
        if kind.startswith("int"):
            return None if raw.lower() == "none" else int(raw)
        if kind.startswith("float"):
            return float(raw)
    except ValueError:
        raise ParameterError(f"bad value for {name}: {raw!r}") from None
    return raw


def read_config(path: str | Path) -> dict:
    try:
        return parse_config_text(Path(path).read_text())
    except OSError as exc:
        raise DataError(f"cannot read config file {path}: {exc}") from None


# seeding and summaries ----------------------------------------------------------


def realization_seed(master: int, method: str, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=master, spawn_key=(zlib.crc32(method.encode()), index))


def summarize(values, error: str = "std") -> tuple[float, float, int]:
    """``(mean, deviation, count)`` over the finite values; one value has deviation 0."""
    vals = [float(v) for v in values if v is not None and math.isfinite(v)]
    if not vals:
        return math.nan, math.nan, 0
    mean = statistics.fmean(vals)
    dev = statistics.stdev(vals) if len(vals) > 1 else 0.0
    if error == "sem":
        dev /= math.sqrt(len(vals))
    return mean, dev, len(vals)


def _fmt(x) -> str:
    if isinstance(x, float):
        return "nan" if math.isnan(x) else repr(x)
    return str(x)


# per-realization work -------------------------------------------------------------


@dataclass
class Realization:
    method: str
    index: int
    stats: dict[str, float]
    seconds: float
    extra: dict[str, float] = field(default_factory=dict)


_SHARED: dict = {}


def _init_worker(graph: Graph, vmax_label: int) -> None:
    _SHARED["graph"] = graph
    _SHARED["vmax"] = vmax_label


def check_sample(original: Graph, sub: Graph) -> None:
    """Raise :class:`InvariantViolation` unless ``sub`` is a simple subgraph of ``original``."""
    try:
        sub.validate()
    except AssertionError as exc:
        raise InvariantViolation(f"sampled graph is not simple: {exc}") from None
    try:
        ids = original.index_of(sub.labels)
    except KeyError:
        raise InvariantViolation("sampled node not in the original graph") from None
    e = sub.edges()
    if e.size:
        u, v = ids[e[:, 0]], ids[e[:, 1]]
        keys = np.minimum(u, v) * np.int64(original.node_count) + np.maximum(u, v)
        known = original.edge_keys()
        pos = np.clip(np.searchsorted(known, keys), 0, known.size - 1)
        if not np.array_equal(known[pos], keys):
            raise InvariantViolation("sampled edge not in the original graph")


def graph_stats(g: Graph, vmax_label: int, toggles, heavy: bool, cfg: ExperimentConfig,
                rng) -> dict[str, float]:
    heavy = heavy and any(t in toggles for t in HEAVY_STATS)
    apl_sources = cfg.apl_sources if g.node_count > cfg.apl_exact_max_nodes else None
    rep = M.metrics_report(g, vmax_label=vmax_label, heavy=heavy, apl_sources=apl_sources,
                           bc_max_nodes=cfg.bc_max_nodes if "bc" in toggles else -1,
                           rng=rng, light=tuple(toggles))
    apl = rep.apl if "apl" in toggles else math.nan
    return {
        "node_count": float(g.node_count),
        "edge_count": float(g.edge_count),
        "ad": rep.ad, "acc": rep.acc, "apl": apl, "rwsd": rep.rwsd, "rmd": rep.rmd,
        "cc_vmax": rep.cc_vmax, "bc_vmax": rep.bc_vmax,
    }


def _sample_one(cfg: ExperimentConfig, method: str, index: int, n_target: int | None,
                with_metrics: bool = True):
    g: Graph = _SHARED["graph"]
    sample_ss, metric_ss = realization_seed(cfg.seed, method, index).spawn(2)
    rng = np.random.default_rng(sample_ss)
    view = UnknownNetworkView(g)
    extra: dict[str, float] = {}
    start = time.perf_counter()
    if method == "SLSR":
        out = slsr_sample(view, cfg.slsr_config(), rng)
        sub = out.subgraph
        extra = {"x_percent": math.nan if out.x_percent is None else float(out.x_percent),
                 "fallback": float(out.fallback), "est_ad": out.params.ad,
                 "est_dt": float(out.params.dt)}
    else:
        sub = sample_baseline(view, cfg.traversal(method), n_target, rng)
    seconds = time.perf_counter() - start
    if cfg.check_invariants:
        check_sample(g, sub)
        if method != "SLSR" and sub.node_count != n_target:
            raise InvariantViolation(f"{method} returned {sub.node_count} nodes, wanted {n_target}")
    stats = {}
    if with_metrics:
        heavy = index < cfg.heavy_realizations
        stats = graph_stats(sub, _SHARED["vmax"], cfg.metrics, heavy, cfg,
                            np.random.default_rng(metric_ss))
    else:
        stats = {"node_count": float(sub.node_count), "edge_count": float(sub.edge_count),
                 "ad": M.average_degree(sub)}
    return Realization(method, index, stats, seconds, extra), sub


def _task(args):
    cfg, method, index, n_target = args
    return _sample_one(cfg, method, index, n_target)[0]


def _run_tasks(cfg: ExperimentConfig, graph: Graph, vmax: int, tasks: list) -> list[Realization]:
    if cfg.workers == 1 or len(tasks) == 1:
        _init_worker(graph, vmax)
        return [_task(t) for t in tasks]
    with ProcessPoolExecutor(cfg.workers, initializer=_init_worker, initargs=(graph, vmax)) as ex:
        return list(ex.map(_task, tasks))  # map keeps submission order


def baseline_target(mean_nodes: float, node_count: int) -> int:
    return min(node_count, max(1, math.floor(mean_nodes + 0.5)))


# compare ----------------------------------------------------------------------------


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    dataset_sha256: str
    n_target: int | None
    original: dict[str, float]
    realizations: list[Realization]
    summary: dict[str, dict[str, tuple[float, float, int]]]

    def rows(self) -> list[str]:
        return [r for r in ROW_ORDER if r in self.summary]

    def provenance(self) -> dict:
        return {
            "seed": self.config.seed,
            "config_hash": self.config.config_hash(),
            "dataset": self.config.dataset,
            "dataset_sha256": self.dataset_sha256,
            "version": __version__,
        }

    def to_json(self) -> str:
        summary = {row: {stat: {"mean": m, "deviation": d, "count": n}
                         for stat, (m, d, n) in self.summary[row].items()}
                   for row in self.rows()}
        doc = {
            "provenance": self.provenance(),
            "config": self.config.fingerprint(),
            "n_target": self.n_target,
            "error": self.config.error,
            "summary": summary,
        }
        # NaN is not valid JSON
        return json.dumps(_nan_to_none(doc), indent=2, sort_keys=True) + "\n"

    def summary_csv(self) -> str:
        header = ["method", "realizations"]
        for stat in STAT_COLUMNS:
            header += [f"{stat}_mean", f"{stat}_dev", f"{stat}_n"]
        lines = [",".join(header)]
        for row in self.rows():
            s = self.summary[row]
            count = 1 if row == "original" else sum(r.method == row for r in self.realizations)
            cells = [row, str(count)]
            for stat in STAT_COLUMNS:
                m, d, n = s[stat]
                cells += [_fmt(m), _fmt(d), str(n)]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def realizations_csv(self) -> str:
        lines = ["method,realization,statistic,value"]
        for r in self.realizations:
            for stat, val in list(r.stats.items()) + list(r.extra.items()):
                if math.isfinite(val):
                    lines.append(f"{r.method},{r.index},{stat},{_fmt(val)}")
        return "\n".join(lines) + "\n"

    def runtime_csv(self) -> str:
        lines = ["method,realization,seconds"]
        lines += [f"{r.method},{r.index},{r.seconds:.6f}" for r in self.realizations]
        return "\n".join(lines) + "\n"

    def write(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        files = {"summary.csv": self.summary_csv(), "realizations.csv": self.realizations_csv(),
                 "report.json": self.to_json(), "runtime.csv": self.runtime_csv()}
        for name, text in files.items():
            (out / name).write_text(text)
        return [out / n for n in files]


def _nan_to_none(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _nan_to_none(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_nan_to_none(v) for v in obj]
    return obj


def _summarize_rows(realizations: list[Realization], error: str):
    by_method: dict[str, list[Realization]] = {}
    for r in realizations:
        by_method.setdefault(r.method, []).append(r)
    return {m: {stat: summarize([r.stats.get(stat, math.nan) for r in rs], error)
                for stat in STAT_COLUMNS}
            for m, rs in by_method.items()}


def run_compare(cfg: ExperimentConfig, graph: Graph | None = None,
                dataset_sha256: str | None = None) -> ExperimentReport:
    """SLSR realizations, then node-count-matched baselines, then statistics."""
    if graph is None:
        graph, dataset_sha256 = load_dataset(cfg.dataset)
    vmax = int(graph.labels[M.max_degree_node(graph)])
    results: list[Realization] = []
    n_target = cfg.n_target
    if "SLSR" in cfg.methods:
        tasks = [(cfg, "SLSR", i, None) for i in range(cfg.realizations)]
        results += _run_tasks(cfg, graph, vmax, tasks)
        mean_nodes = statistics.fmean(r.stats["node_count"] for r in results)
        n_target = baseline_target(mean_nodes, graph.node_count)
    elif n_target is None:
        n_target = baseline_target(graph.node_count * cfg.r_slsr, graph.node_count)
    baselines = [m for m in ROW_ORDER if m in cfg.methods and m != "SLSR"]
    tasks = [(cfg, m, i, n_target) for m in baselines for i in range(cfg.realizations)]
    if tasks:
        results += _run_tasks(cfg, graph, vmax, tasks)
    original = graph_stats(graph, vmax, cfg.metrics, cfg.heavy_realizations > 0, cfg,
                           np.random.default_rng(realization_seed(cfg.seed, "original", 0)))
    summary = {"original": {s: summarize([original[s]], cfg.error) for s in STAT_COLUMNS}}
    summary.update(_summarize_rows(results, cfg.error))
    report = ExperimentReport(cfg, dataset_sha256 or "", n_target, original, results, summary)
    if cfg.out:
        report.write(cfg.out)
    return report


# estimate ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EstimateRow:
    r_rn: float
    realizations: int
    ad_mean: float
    ad_dev: float
    dt_mean: float
    dt_dev: float
    seconds_mean: float


def run_estimate(graph: Graph, rates, realizations: int = 100, seed: int = 0,
                 error: str = "std") -> list[EstimateRow]:
    """Mean and deviation of the estimated AD and DT at each random-node rate.

    Rate 1.0 reads every node, so a single realization is run there.
    """
    rows = []
    for rate in rates:
        reps = 1 if rate >= 1.0 else realizations
        ads, dts, secs = [], [], []
        for i in range(reps):
            rng = np.random.default_rng(realization_seed(seed, f"estimate:{rate!r}", i))
            start = time.perf_counter()
            p = estimate_params(UnknownNetworkView(graph), rate, rng)
            secs.append(time.perf_counter() - start)
            ads.append(p.ad)
            dts.append(float(p.dt))
        ad_m, ad_d, _ = summarize(ads, error)
        dt_m, dt_d, _ = summarize(dts, error)
        rows.append(EstimateRow(rate, reps, ad_m, ad_d, dt_m, dt_d, statistics.fmean(secs)))
    return rows


def estimate_csv(rows: list[EstimateRow]) -> str:
    lines = ["r_rn,realizations,ad_mean,ad_dev,dt_mean,dt_dev"]
    lines += [",".join(_fmt(x) for x in (r.r_rn, r.realizations, r.ad_mean, r.ad_dev,
                                         r.dt_mean, r.dt_dev)) for r in rows]
    return "\n".join(lines) + "\n"


# partition, distributions, subgraph export ----------------------------------------------


def run_partition(graph: Graph, dt: float) -> CorePeripheryStats:
    return partition_stats(graph, dt)


def partition_csv(stats: CorePeripheryStats) -> str:
    d = dataclasses.asdict(stats)
    return ",".join(d) + "\n" + ",".join(_fmt(v) for v in d.values()) + "\n"


def export_distributions(graph: Graph, out_dir: str | Path, cfg: ExperimentConfig | None = None) -> list[Path]:
    """Write distribution CSVs for ``graph`` into ``out_dir``."""
    apl_sources = None
    rng = None
    if cfg is not None and graph.node_count > cfg.apl_exact_max_nodes:
        apl_sources = cfg.apl_sources
        rng = np.random.default_rng(realization_seed(cfg.seed, "distributions", 0))
    return M.export_distributions(M.distributions(graph, apl_sources, rng), out_dir)


def run_distributions(cfg: ExperimentConfig, graph: Graph) -> dict[str, Path]:
    """Export distributions of the original and one representative sample per method.

    The representative is the realization whose AD is closest to that
    method's mean AD (earliest realization on ties).  Files go to
    ``<out>/original`` and ``<out>/<method>``.
    """
    if not cfg.out:
        raise ParameterError("distributions needs an output directory")
    out = Path(cfg.out)
    dirs = {"original": out / "original"}
    export_distributions(graph, dirs["original"], cfg)
    _init_worker(graph, int(graph.labels[M.max_degree_node(graph)]))
    n_target = cfg.n_target
    samples: dict[str, list] = {}
    for method in [m for m in ROW_ORDER if m in cfg.methods]:
        if method != "SLSR" and n_target is None:
            if "SLSR" in samples:
                mean_nodes = statistics.fmean(r.stats["node_count"] for r, _ in samples["SLSR"])
            else:
                mean_nodes = graph.node_count * cfg.r_slsr
            n_target = baseline_target(mean_nodes, graph.node_count)
        samples[method] = [_sample_one(cfg, method, i, n_target, with_metrics=False)
                           for i in range(cfg.realizations)]
        ads = [r.stats["ad"] for r, _ in samples[method]]
        mean = statistics.fmean(ads)
        best = min(range(len(ads)), key=lambda i: (abs(ads[i] - mean), i))
        dirs[method] = out / method
        export_distributions(samples[method][best][1], dirs[method], cfg)
    return dirs


def export_subgraph(sample: SlsrOutput | Graph, path: str | Path) -> Path:
    """Write a sampled subgraph as a tab-separated edge list of original ids."""
    g = sample.subgraph if isinstance(sample, SlsrOutput) else sample
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        write_edge_list(g, fh)
    return path
