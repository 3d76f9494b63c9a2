import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import complete, cycle, star
from oracles import adjacency_sets, literal_threshold
from slsr import (ParameterError, SampleTooSmallError, UnknownNetworkView, estimate_params,
                  generate_ba, generate_ba_mixed, generate_gnp)


def test_star_threshold_hand_trace():
    p = estimate_params(UnknownNetworkView(star(4)), 1.0, np.random.default_rng(0))
    assert p.dt == 1
    # k=1 adds the four leaf-centre pairs, k=2 adds and removes nothing
    assert p.trace == ((1, 4, 0), (2, 0, 0))
    assert p.ad == pytest.approx(1.6)


def test_regular_graph_gives_zero_threshold():
    for g in (cycle(8), complete(5)):
        assert estimate_params(UnknownNetworkView(g), 1.0, np.random.default_rng(0)).dt == 0


def test_full_rate_exact_average():
    g = generate_ba(800, 3, seed=4)
    p = estimate_params(UnknownNetworkView(g), 1.0, np.random.default_rng(7))
    assert p.ad == 2 * g.edge_count / g.node_count
    assert p.sample.size == g.node_count


@given(st.integers(0, 10_000), st.sampled_from(["bamix", "ba1", "gnp"]), st.floats(0.05, 1.0))
@settings(max_examples=40, deadline=None)
def test_threshold_matches_literal_loop(seed, kind, rate):
    if kind == "bamix":
        g = generate_ba_mixed(300, 6, seed=seed)
    elif kind == "ba1":
        g = generate_ba(300, 1, seed=seed)
    else:
        g = generate_gnp(200, 0.03, seed=seed)
    p = estimate_params(UnknownNetworkView(g), rate, np.random.default_rng(seed))
    assert p.dt == literal_threshold(adjacency_sets(g), p.sample.tolist())
    assert p.dt <= p.d_max == g.degrees[p.sample].max()
    assert p.ad == g.degrees[p.sample].sum() / p.sample.size


def test_sample_size_is_floor():
    g = generate_ba(1001, 2, seed=0)
    p = estimate_params(UnknownNetworkView(g), 0.35, np.random.default_rng(0))
    assert p.sample.size == 350


def test_added_exceeds_removed_below_threshold():
    g = generate_ba_mixed(3000, 5, seed=2)
    p = estimate_params(UnknownNetworkView(g), 1.0, np.random.default_rng(0))
    assert p.dt >= 2
    for k, added, removed in p.trace:
        if k <= p.dt:
            assert added > removed


def test_determinism():
    g = generate_ba_mixed(1000, 5, seed=1)
    a = estimate_params(UnknownNetworkView(g), 0.3, np.random.default_rng(11))
    b = estimate_params(UnknownNetworkView(g), 0.3, np.random.default_rng(11))
    assert (a.ad, a.dt, a.trace) == (b.ad, b.dt, b.trace)
    assert np.array_equal(a.sample, b.sample)


def test_only_sampled_nodes_have_lists_read():
    g = generate_ba_mixed(1000, 5, seed=1)
    v = UnknownNetworkView(g)
    p = estimate_params(v, 0.2, np.random.default_rng(0))
    assert v.log.queried_nodes == set(p.sample.tolist())
    nbrs = set(np.concatenate([g.neighbors(x) for x in p.sample]).tolist())
    assert v.log.degree_probed == nbrs


@pytest.mark.parametrize("rate", [0.0, -0.1, 1.5])
def test_bad_rate(rate):
    with pytest.raises(ParameterError):
        estimate_params(UnknownNetworkView(star(3)), rate)


def test_sample_too_small():
    with pytest.raises(SampleTooSmallError):
        estimate_params(UnknownNetworkView(star(3)), 0.1)
