"""Command-line entry point: ``slsr <subcommand> [flags]``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant
violation.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import metrics as M
from .access import UnknownNetworkView
from .errors import DataError, InvariantViolation, MetricUndefinedError, ParameterError
from .harness import (STAT_COLUMNS, ExperimentConfig, coerce_field, estimate_csv, export_subgraph,
                      graph_stats, load_dataset, partition_csv, read_config, realization_seed,
                      run_compare, run_distributions, run_estimate, run_partition)
from .pipeline import slsr_sample
from .traversal import sample_baseline

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INVARIANT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser, *flags: str) -> None:
    # defaults stay None so config-file values are not overridden by them
    opts = {
        "dataset": dict(help="edge-list path (.gz ok) or ba:N:M:SEED / bamix:N:M:SEED / gnp:N:P:SEED"),
        "method": dict(help="comma-separated methods among SLSR,FF,RD,SRW,NBRW"),
        "r-slsr": dict(type=float, help="periphery sampling rate"),
        "r-rn": dict(help="random-node rate; estimate also takes a comma-separated list"),
        "realizations": dict(type=int),
        "heavy-realizations": dict(type=int, help="realizations that also get APL and BC"),
        "seed": dict(type=int, help="master seed"),
        "workers": dict(type=int),
        "out": dict(help="output file or directory"),
        "config": dict(help="key = value config file; flags override it"),
        "dt": dict(type=float, help="degree threshold"),
    }
    for f in flags:
        p.add_argument(f"--{f}", **opts[f])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="slsr", description="Graph sampling on unknown networks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="parse and simplify an edge list, report its size")
    _common(p, "dataset", "out", "config")

    p = sub.add_parser("estimate", help="estimated AD and DT per random-node rate")
    _common(p, "dataset", "r-rn", "realizations", "seed", "out", "config")

    p = sub.add_parser("partition", help="core/periphery shares at a degree threshold")
    _common(p, "dataset", "dt", "out", "config")

    p = sub.add_parser("sample", help="draw one subgraph and write its edge list")
    _common(p, "dataset", "method", "r-slsr", "r-rn", "seed", "out", "config")

    p = sub.add_parser("metrics", help="scalar statistics of a graph")
    _common(p, "dataset", "out", "config")

    p = sub.add_parser("compare", help="multi-realization comparison of samplers")
    _common(p, "dataset", "method", "r-slsr", "r-rn", "realizations", "heavy-realizations",
            "seed", "workers", "out", "config")
    p.add_argument("--sem", action="store_true", default=None,
                   help="report deviation / sqrt(n) instead of the sample deviation")

    p = sub.add_parser("distributions", help="distribution CSVs for the original and samples")
    _common(p, "dataset", "method", "r-slsr", "r-rn", "realizations", "seed", "out", "config")
    return parser


def _settings(args) -> dict:
    """Config-file values overlaid with every flag that was given."""
    s = read_config(args.config) if getattr(args, "config", None) else {}
    flag_map = {"dataset": "dataset", "r_slsr": "r_slsr", "realizations": "realizations",
                "heavy_realizations": "heavy_realizations", "seed": "seed",
                "workers": "workers", "out": "out"}
    for attr, key in flag_map.items():
        val = getattr(args, attr, None)
        if val is not None:
            s[key] = val
    if getattr(args, "method", None):
        s["methods"] = coerce_field("methods", args.method)
    if getattr(args, "sem", None):
        s["error"] = "sem"
    if getattr(args, "r_rn", None) is not None:
        rates = _rates(args.r_rn)
        s["r_rn"] = rates if args.command == "estimate" else rates[0]
    if "dataset" not in s:
        raise ParameterError("--dataset is required (flag or config file)")
    return s


def _rates(text: str) -> list[float]:
    try:
        rates = [float(r) for r in text.split(",") if r.strip()]
    except ValueError:
        raise ParameterError(f"bad --r-rn value {text!r}") from None
    if not rates:
        raise ParameterError("--r-rn needs at least one rate")
    return rates


def _config(s: dict, **overrides) -> ExperimentConfig:
    s = {**s, **overrides}
    s.pop("dt", None)
    if "heavy_realizations" not in s:
        default = ExperimentConfig.__dataclass_fields__["heavy_realizations"].default
        s["heavy_realizations"] = min(default, s.get("realizations", default))
    return ExperimentConfig(**s)


def _print_kv(pairs) -> None:
    for k, v in pairs:
        print(f"{k}={v}")


def cmd_ingest(args) -> None:
    s = _settings(args)
    g, sha = load_dataset(s["dataset"])
    _print_kv([("nodes", g.node_count), ("edges", g.edge_count),
               ("average_degree", M.average_degree(g)), ("max_degree", g.max_degree),
               ("sha256", sha)])
    if s.get("out"):
        export_subgraph(g, s["out"])


def cmd_estimate(args) -> None:
    s = _settings(args)
    rates = s.pop("r_rn", [0.15, 0.2, 0.25, 0.3, 0.35])
    if not isinstance(rates, list):
        rates = [rates]
    g, _ = load_dataset(s["dataset"])
    rows = run_estimate(g, rates, s.get("realizations", 100), s.get("seed", 0))
    for r in rows:
        print(f"r_rn={r.r_rn} realizations={r.realizations} AD {r.ad_mean:.3f} ± {r.ad_dev:.3f} "
              f"DT {r.dt_mean:.2f} ± {r.dt_dev:.3f} time {r.seconds_mean:.3f}s")
    if s.get("out"):
        Path(s["out"]).parent.mkdir(parents=True, exist_ok=True)
        Path(s["out"]).write_text(estimate_csv(rows))


def cmd_partition(args) -> None:
    s = _settings(args)
    dt = args.dt if args.dt is not None else s.get("dt")
    if dt is None:
        raise ParameterError("--dt is required")
    g, _ = load_dataset(s["dataset"])
    st = run_partition(g, float(dt))
    _print_kv([("dt", st.dt),
               ("core_nodes_pct", f"{100 * st.core_node_frac:.2f}"),
               ("periphery_nodes_pct", f"{100 * st.periphery_node_frac:.2f}"),
               ("core_edges_pct", f"{100 * st.core_edge_frac:.2f}"),
               ("vertical_edges_pct", f"{100 * st.vertical_edge_frac:.2f}"),
               ("periphery_edges_pct", f"{100 * st.periphery_edge_frac:.2f}"),
               ("r_per_pct", f"{100 * st.r_per:.2f}"),
               ("core_edge_density", f"{st.core_edge_density:.4f}")])
    if s.get("out"):
        Path(s["out"]).write_text(partition_csv(st))


def cmd_sample(args) -> None:
    s = _settings(args)
    s.setdefault("methods", ("SLSR",))
    cfg = _config(s, realizations=1, heavy_realizations=0)
    if len(cfg.methods) != 1:
        raise ParameterError("sample takes exactly one --method")
    g, _ = load_dataset(cfg.dataset)
    method = cfg.methods[0]
    rng = np.random.default_rng(realization_seed(cfg.seed, method, 0).spawn(2)[0])
    view = UnknownNetworkView(g)
    if method == "SLSR":
        out = slsr_sample(view, cfg.slsr_config(), rng)
        sub = out.subgraph
        _print_kv([("est_ad", out.params.ad), ("est_dt", out.params.dt),
                   ("x_percent", out.x_percent), ("fallback", out.fallback)])
    else:
        n = cfg.n_target or max(1, int(g.node_count * cfg.r_slsr))
        sub = sample_baseline(view, cfg.traversal(method), n, rng)
    _print_kv([("nodes", sub.node_count), ("edges", sub.edge_count),
               ("average_degree", M.average_degree(sub))])
    if cfg.out:
        export_subgraph(sub, cfg.out)


def cmd_metrics(args) -> None:
    s = _settings(args)
    cfg = _config(s)
    g, _ = load_dataset(cfg.dataset)
    stats = graph_stats(g, int(g.labels[M.max_degree_node(g)]), cfg.metrics, True, cfg,
                        np.random.default_rng(realization_seed(cfg.seed, "original", 0)))
    _print_kv((k, stats[k]) for k in STAT_COLUMNS)
    if cfg.out:
        Path(cfg.out).write_text("statistic,value\n" + "".join(
            f"{k},{stats[k]!r}\n" for k in STAT_COLUMNS))


def cmd_compare(args) -> None:
    cfg = _config(_settings(args))
    rep = run_compare(cfg)
    print(f"n_target={rep.n_target}")
    for row in rep.rows():
        m = rep.summary[row]
        print(f"{row:<8} nodes {m['node_count'][0]:.1f} ± {m['node_count'][1]:.1f}  "
              f"AD {m['ad'][0]:.3f} ± {m['ad'][1]:.3f}  ACC {m['acc'][0]:.4f}  "
              f"APL {m['apl'][0]:.3f}  RWSD {m['rwsd'][0]:.4f}  RMD {m['rmd'][0]:.4f}")


def cmd_distributions(args) -> None:
    cfg = _config(_settings(args))
    g, _ = load_dataset(cfg.dataset)
    for name, path in run_distributions(cfg, g).items():
        print(f"{name}={path}")


COMMANDS = {
    "ingest": cmd_ingest, "estimate": cmd_estimate, "partition": cmd_partition,
    "sample": cmd_sample, "metrics": cmd_metrics, "compare": cmd_compare,
    "distributions": cmd_distributions,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ParameterError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, MetricUndefinedError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
