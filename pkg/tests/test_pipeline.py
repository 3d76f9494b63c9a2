import math
import statistics

import numpy as np
import pytest

from builders import complete
from slsr import (ParameterError, SlsrConfig, TraversalConfig, UnknownNetworkView, assemble,
                  bisect_x, estimate_params, generate_ba, generate_ba_mixed, periphery_sampling,
                  slsr_sample)
from slsr import metrics as M
from slsr.harness import check_sample
from slsr.pipeline import MAX_PROBES, CoreAssembler


def setup(seed=0, n=2000, m=5, rate=0.1, method="FF"):
    g = generate_ba_mixed(n, m, seed=seed)
    v = UnknownNetworkView(g)
    rng = np.random.default_rng(seed)
    p = estimate_params(v, 0.35, rng)
    per = periphery_sampling(v, TraversalConfig(method), p.dt, rate, rng)
    return g, v, p, per


def test_keep_count_ceiling():
    g, v, _, per = setup()
    asm = CoreAssembler(per, v)
    assert asm.keep_count(5, 30) == 2
    assert asm.keep_count(5, 100) == 5
    assert asm.keep_count(1, 1) == 1
    assert asm.keep_count(0, 50) == 0
    assert asm.keep_count(3, 34) == 2  # 1.02 rounds up


def test_full_retention_keeps_every_vertical_edge():
    g, v, _, per = setup()
    a = assemble(per, 100, v)
    expected = sum(per.core_neighbors[x][0].size for x in per.nodes.tolist())
    assert a.vertical_edges.shape[0] == expected


def test_empty_core_lists_give_periphery_graph():
    g = generate_ba(400, 2, seed=0)
    v = UnknownNetworkView(g)
    per = periphery_sampling(v, TraversalConfig(), math.inf, 0.2, np.random.default_rng(0))
    for x in (1, 50, 100):
        a = assemble(per, x, v)
        assert a.core_nodes.size == 0
        assert a.edge_count == per.edges.shape[0]


def test_prefix_property_and_core_edge_completeness():
    g, v, _, per = setup(seed=3)
    asm = CoreAssembler(per, v)
    for x in (1, 13, 50, 87, 100):
        a = asm.assemble(x)
        kept: dict[int, list[int]] = {}
        for p_, c in a.vertical_edges.tolist():
            kept.setdefault(p_, []).append(c)
        for p_, cs in kept.items():
            ids = per.core_neighbors[p_][0].tolist()
            t = len(ids)
            assert cs == ids[: math.ceil(t * x / 100)]
        induced = g.induced_subgraph(a.core_nodes)
        assert a.core_edges.shape[0] == induced.edge_count
        keys = set((a.core_edges[:, 0] * g.node_count + a.core_edges[:, 1]).tolist())
        ref = set((a.core_nodes[induced.edges()] @ [g.node_count, 1]).tolist())
        assert keys == ref


def test_average_degree_formula():
    g, v, _, per = setup(seed=5)
    a = assemble(per, 40, v)
    n = per.nodes.size + a.core_nodes.size
    m = per.edges.shape[0] + a.vertical_edges.shape[0] + a.core_edges.shape[0]
    assert a.ad == 2 * m / n


def test_bisection_probe_sequence_and_bracket():
    g, v, p, per = setup(seed=1)
    x_opt, best, state = bisect_x(per, v, p.ad)
    xs = [x for x, _ in state.history]
    assert 1 not in xs and 100 not in xs
    assert len(xs) <= MAX_PROBES
    assert xs[0] == 51
    dists = [abs(ad - p.ad) for _, ad in state.history]
    assert abs(best.ad - p.ad) == min(dists)
    assert state.min_distance == min(dists)


def test_target_below_everything_walks_down():
    g, v, _, per = setup(seed=2)
    _, _, state = bisect_x(per, v, 1e-6)
    xs = [x for x, _ in state.history]
    assert xs == [51, 26, 14, 8, 5, 3, 2]
    ads = [ad for _, ad in state.history]
    # ties resolve to the later, smaller x
    assert state.x_opt == min(x for x, ad in state.history if ad == min(ads))


def test_target_above_everything_walks_up():
    g, v, _, per = setup(seed=2)
    _, _, state = bisect_x(per, v, 1e6)
    xs = [x for x, _ in state.history]
    assert xs == [51, 76, 88, 94, 97, 99]
    assert state.x_opt == 99


def test_distance_update_variant_runs():
    g, v, p, per = setup(seed=4)
    x_opt, best, state = bisect_x(per, v, p.ad, update="distance")
    assert len(state.history) <= MAX_PROBES
    assert abs(best.ad - p.ad) == min(abs(ad - p.ad) for _, ad in state.history)


def test_bad_target():
    g, v, _, per = setup()
    with pytest.raises(ParameterError):
        bisect_x(per, v, 0.0)
    with pytest.raises(ParameterError):
        assemble(per, 0, v)


@pytest.mark.parametrize("method", ["FF", "SRW", "NBRW", "RD"])
def test_slsr_output_composition(method):
    g = generate_ba_mixed(3000, 6, seed=7)
    v = UnknownNetworkView(g)
    out = slsr_sample(v, SlsrConfig(0.08, t_s=TraversalConfig(method)), np.random.default_rng(7))
    assert not out.fallback
    sub = out.subgraph
    check_sample(g, sub)
    assert np.array_equal(g.index_of(sub.labels), out.nodes)
    assert sub.edge_count == out.e_per.shape[0] + out.e_cor.shape[0] + out.e_ver.shape[0]
    # the three edge classes are disjoint
    all_keys = np.concatenate([e[:, 0] * g.node_count + e[:, 1] if e.size else e.reshape(0)
                               for e in (out.e_per, out.e_cor, np.sort(out.e_ver, axis=1))])
    assert np.unique(all_keys).size == all_keys.size
    assert np.all(g.degrees[out.v_per] <= out.params.dt)
    assert np.all(g.degrees[out.v_cor] > out.params.dt)


def test_slsr_access_contract():
    g = generate_ba_mixed(3000, 6, seed=8)
    v = UnknownNetworkView(g)
    out = slsr_sample(v, SlsrConfig(0.1), np.random.default_rng(8))
    allowed = set(out.params.sample.tolist()) | set(out.v_per.tolist()) | out.core_probed
    assert v.log.queried_nodes <= allowed
    assert set(out.v_cor.tolist()) <= out.core_probed


def test_slsr_deterministic():
    g = generate_ba_mixed(2000, 5, seed=1)
    a = slsr_sample(UnknownNetworkView(g), SlsrConfig(0.1), np.random.default_rng(3))
    b = slsr_sample(UnknownNetworkView(g), SlsrConfig(0.1), np.random.default_rng(3))
    assert a.x_percent == b.x_percent
    assert np.array_equal(a.subgraph.labels, b.subgraph.labels)
    assert np.array_equal(a.subgraph.indices, b.subgraph.indices)


def test_fallback_on_regular_graph():
    g = complete(30)
    out = slsr_sample(UnknownNetworkView(g), SlsrConfig(0.5), np.random.default_rng(0))
    assert out.fallback and out.x_percent is None and out.params.dt == 0
    assert out.subgraph.node_count == 15


@pytest.mark.parametrize("kw", [dict(r_slsr=0), dict(r_slsr=1.2), dict(r_slsr=0.1, r_rn=0),
                                dict(r_slsr=0.1, bisection="golden")])
def test_bad_config(kw):
    with pytest.raises(ParameterError):
        SlsrConfig(**kw)


def test_tracks_target_when_periphery_exists():
    # same protocol as the BA(20000, 5) tracking check in the acceptance suite,
    # on a graph that has degree-1 nodes and therefore a non-empty periphery
    g = generate_ba_mixed(20_000, 9, seed=5)
    errors = []
    for i in range(20):
        out = slsr_sample(UnknownNetworkView(g), SlsrConfig(0.05), np.random.default_rng(i))
        assert not out.fallback
        errors.append(abs(M.average_degree(out.subgraph) - out.params.ad))
    assert statistics.fmean(errors) <= 0.5
