import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from builders import complete, cycle, graph_of, path, star
from oracles import (apl_oracle, betweenness_oracle, closeness_oracle, floyd_warshall,
                     local_clustering_oracle)
from slsr import EmptyGraphError, MetricUndefinedError, generate_ba, generate_ba_mixed, generate_gnp
from slsr import metrics as M


@st.composite
def small_graphs(draw, max_nodes=40):
    n = draw(st.integers(2, max_nodes))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
                          min_size=1, max_size=4 * n))
    pairs = [(u, v) for u, v in pairs if u != v] or [(0, 1)]
    return graph_of(pairs)


def gnp_or_skip(n, p, seed):
    try:
        return generate_gnp(n, p, seed=seed)
    except EmptyGraphError:
        assume(False)


def test_average_degree_examples():
    assert M.average_degree(complete(2)) == 1.0
    assert M.average_degree(star(4)) == 1.6


def test_ccdf_examples():
    assert M.degree_ccdf(complete(2)) == {0: 1.0, 1: 0.0}
    f = M.degree_ccdf(path(3))
    assert f[0] == 1.0 and f[1] == pytest.approx(1 / 3) and f[2] == 0.0


@given(small_graphs())
@settings(max_examples=40, deadline=None)
def test_distribution_invariants(g):
    p = M.degree_pmf(g)
    assert math.fsum(p.values()) == pytest.approx(1, abs=1e-12)
    f = M.degree_ccdf(g)
    ks = sorted(f)
    assert f[ks[-1]] == 0.0 and ks[-1] == g.max_degree
    for k in ks[1:]:
        assert f[k] <= f[k - 1]
        assert f[k - 1] - f[k] == pytest.approx(p.get(k, 0.0), abs=1e-12)
    try:
        mu = M.path_lengths(g).pmf
    except MetricUndefinedError:
        return
    assert math.fsum(mu.values()) == pytest.approx(1, abs=1e-12)


def test_clustering_examples():
    assert M.clustering(complete(3))[0] == 1.0
    assert M.clustering(star(6))[0] == 0.0


@given(small_graphs())
@settings(max_examples=40, deadline=None)
def test_clustering_two_routes_and_oracle(g):
    acc, _ = M.clustering(g)
    local = M.local_clustering(g)
    assert np.allclose(local, local_clustering_oracle(g), atol=1e-15)
    assert abs(acc - local.mean()) <= 1e-12


def test_path_length_examples():
    pl = M.path_lengths(path(3))
    assert pl.apl == pytest.approx(4 / 3) and pl.pmf == {1: pytest.approx(2 / 3), 2: pytest.approx(1 / 3)}
    assert M.path_lengths(complete(7)).apl == 1.0


def test_path_length_single_node_component():
    g = graph_of([(0, 1)]).induced_subgraph([0])
    with pytest.raises(MetricUndefinedError):
        M.path_lengths(g)


@given(st.integers(10, 200), st.floats(0.01, 0.1), st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_path_lengths_match_floyd_warshall(n, p, seed):
    g = gnp_or_skip(n, p, seed)
    try:
        got = M.path_lengths(g)
    except MetricUndefinedError:
        return
    apl, mu = apl_oracle(g)
    # ordered vs unordered pair counts differ by an exact factor of 2
    assert got.apl == apl
    assert got.pmf == mu


def test_sampled_path_lengths_flagged_and_close():
    g = generate_ba(3000, 3, seed=0)
    exact = M.path_lengths(g)
    approx = M.path_lengths(g, sample_sources=300, rng=1)
    assert approx.sampled and not exact.sampled and approx.sources == 300
    assert approx.apl == pytest.approx(exact.apl, rel=0.02)


def test_rwsd_examples():
    assert abs(M.rwsd(complete(2)) - 1.0) <= 1e-12
    assert abs(M.rwsd(cycle(4)) - 0.5) <= 1e-12
    assert M.rwsd_eigen_oracle(complete(4)) == pytest.approx((1 + 1 / 27) / 4, abs=1e-12)
    assert M.rwsd(complete(4)) == pytest.approx((1 + 1 / 27) / 4, abs=1e-12)


@given(small_graphs())
@settings(max_examples=40, deadline=None)
def test_rwsd_matches_eigen_oracle(g):
    ref = M.rwsd_eigen_oracle(g)
    assert ref >= 0
    assert abs(M.rwsd(g) - ref) <= 1e-9


def test_rwsd_isolated_nodes_match_oracle():
    g = graph_of([(0, 1), (1, 2)]).induced_subgraph([0, 1, 2])
    h = graph_of([(0, 1), (2, 3)]).induced_subgraph([0, 1, 2])  # node 2 isolated
    for x in (g, h):
        assert abs(M.rwsd(x) - M.rwsd_eigen_oracle(x)) <= 1e-12


def test_rwsd_oracle_cap():
    with pytest.raises(MetricUndefinedError):
        M.rwsd_eigen_oracle(generate_ba(50, 2, seed=0), cap=40)


def test_rmd_and_vmax():
    assert M.rmd(star(4)) == 0.8
    g = graph_of([(0, 1), (2, 3), (0, 4), (2, 5)])  # nodes 0 and 2 tie at degree 2
    assert M.max_degree_node(g) == 0


def test_degree_rank_table():
    g = graph_of([(0, 1), (0, 2), (0, 3), (1, 2)])
    assert M.degree_rank_table(g) == [(1, 3, 1), (2, 2, 2), (3, 1, 1)]


def test_closeness_examples():
    assert M.closeness(star(5), 0) == 1.0
    assert M.closeness(path(3), 0) == pytest.approx(2 / 3)
    g = graph_of([(0, 1), (1, 2), (5, 6)])
    assert M.closeness(g, 0) == pytest.approx(2 / 3)  # restricted to its own component
    iso = graph_of([(0, 1)]).induced_subgraph([0, 1])
    iso2 = graph_of([(0, 1), (2, 3)]).induced_subgraph([0, 1, 2])
    assert M.closeness(iso, 0) == 1.0
    with pytest.raises(MetricUndefinedError):
        M.closeness(iso2, 2)


@given(small_graphs(), st.integers(0, 39))
@settings(max_examples=30, deadline=None)
def test_closeness_matches_oracle(g, v):
    v %= g.node_count
    if g.degree(v) == 0:
        return
    assert M.closeness(g, v) == pytest.approx(closeness_oracle(g, v), rel=1e-12)


def test_betweenness_examples():
    assert M.betweenness(star(3), 0) == 1.0
    assert M.betweenness(star(3), 1) == 0.0
    assert M.betweenness(path(3), 1) == 1.0
    with pytest.raises(MetricUndefinedError):
        M.betweenness(complete(2), 0)


@given(st.integers(5, 50), st.floats(0.05, 0.25), st.integers(0, 10_000), st.integers(0, 49))
@settings(max_examples=25, deadline=None)
def test_betweenness_matches_path_enumeration(n, p, seed, v):
    g = gnp_or_skip(n, p, seed)
    v %= g.node_count
    if g.node_count < 3:
        return
    assert abs(M.betweenness(g, v) - betweenness_oracle(g, v)) <= 1e-9


def test_betweenness_sum_identity():
    # sum over v of pair-dependencies equals the total count of interior nodes on shortest paths
    g = generate_gnp(25, 0.2, seed=3)
    n = g.node_count
    dist = floyd_warshall(g)
    pairs = [(s, t) for s in range(n) for t in range(s + 1, n) if math.isfinite(dist[s, t])]
    interior = sum(dist[s, t] - 1 for s, t in pairs)
    total = sum(M.betweenness(g, v) * (n - 1) * (n - 2) / 2 for v in range(n))
    assert total == pytest.approx(interior, rel=1e-12)


def test_metrics_report_fields():
    g = generate_ba_mixed(500, 4, seed=0)
    r = M.metrics_report(g)
    assert r.rmd == g.max_degree / g.node_count
    assert r.vmax == int(g.labels[M.max_degree_node(g)])
    for name in ("ad", "acc", "apl", "rwsd", "rmd", "cc_vmax", "bc_vmax"):
        assert math.isfinite(getattr(r, name))
    assert 0 <= r.acc <= 1 and 0 < r.rmd <= 1 and 0 < r.cc_vmax <= 1 and 0 <= r.bc_vmax <= 1


def test_metrics_report_absent_reference_node():
    g = graph_of([(0, 1), (1, 2)])
    r = M.metrics_report(g, vmax_label=99)
    assert math.isnan(r.cc_vmax) and math.isnan(r.bc_vmax)


def test_export_distributions(tmp_path):
    g = generate_ba(300, 2, seed=0)
    files = M.export_distributions(M.distributions(g), tmp_path)
    assert [f.name for f in files] == ["ccdf.csv", "clustering.csv", "pathlen.csv", "degrank.csv"]
    lines = (tmp_path / "ccdf.csv").read_text().splitlines()
    assert lines[0] == "k,F" and lines[1] == "0,1.0"
    assert (tmp_path / "degrank.csv").read_text().splitlines()[0] == "rank,degree,count"
    mu = [float(x.split(",")[1]) for x in (tmp_path / "pathlen.csv").read_text().splitlines()[1:]]
    assert math.fsum(mu) == pytest.approx(1, abs=1e-12)
