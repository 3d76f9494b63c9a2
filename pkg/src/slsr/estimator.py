"""Random-node estimation of the average degree and the degree threshold.

A uniform node sample ``V`` gives the average degree directly.  The degree
threshold is found by sweeping a candidate threshold ``k = 1, 2, ...`` and
maintaining the set of "vertical" pairs ``(v, u)`` (sampled ``v`` on the
periphery side, neighbour ``u`` on the core side).  Raising ``k`` adds the
pairs of the sampled nodes of degree ``k`` whose neighbour is still core,
and removes the pairs whose core endpoint has degree exactly ``k``.  The
sweep stops at the first ``k`` where additions no longer outnumber
removals and returns ``k - 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .access import UnknownNetworkView
from .errors import ParameterError, SampleTooSmallError

DEFAULT_R_RN = 0.35


@dataclass(frozen=True)
class EstimatedParams:
    ad: float
    dt: int
    sample: np.ndarray
    r_rn: float
    d_max: int
    # (k, |added_edge_set|, |removed_edge_set|) for every k the sweep visited
    trace: tuple[tuple[int, int, int], ...] = field(default=(), repr=False)


def estimate_params(view: UnknownNetworkView, r_rn: float = DEFAULT_R_RN,
                    rng: np.random.Generator | None = None) -> EstimatedParams:
    if not 0 < r_rn <= 1:
        raise ParameterError(f"r_rn must be in (0, 1], got {r_rn}")
    rng = np.random.default_rng(rng)
    size = math.floor(view.node_count * r_rn)
    if size < 1:
        raise SampleTooSmallError(f"floor({view.node_count} * {r_rn}) = 0 sampled nodes")

    with view.phase("estimator"):
        sample = np.sort(view.sample_uniform_nodes(size, rng))
        dst, deg_v = view.neighbors_many(sample)
        src = np.repeat(sample, deg_v)
        distinct = np.unique(dst)
        deg_u = view.degrees(distinct)[np.searchsorted(distinct, dst)]
    deg_src = np.repeat(deg_v, deg_v)

    ad = float(deg_v.sum()) / size
    d_max = int(deg_v.max())
    dt, trace = _threshold_sweep(src, dst, deg_src, deg_u, d_max)
    return EstimatedParams(ad=ad, dt=dt, sample=sample, r_rn=r_rn, d_max=d_max, trace=tuple(trace))


def _threshold_sweep(src, dst, deg_src, deg_u, d_max):
    # pairs grouped by the sampled endpoint's degree so V_k is a slice
    order = np.argsort(deg_src, kind="stable")
    src, dst, deg_src, deg_u = src[order], dst[order], deg_src[order], deg_u[order]
    bounds = np.searchsorted(deg_src, np.arange(d_max + 2))
    deg_of = dict(zip(src.tolist(), deg_src.tolist()))
    # vertical_edge_set bucketed by d(u): the removal predicate at step k
    # can only match pairs whose core endpoint has degree k
    vertical: dict[int, set[tuple[int, int]]] = {}
    trace = []
    dt = 0
    k = 1
    while k <= d_max:
        dt = k
        lo, hi = bounds[k], bounds[k + 1]
        keep = deg_u[lo:hi] > k
        added = dict(zip(zip(src[lo:hi][keep].tolist(), dst[lo:hi][keep].tolist()),
                         deg_u[lo:hi][keep].tolist()))
        bucket = vertical.get(k, set())
        removed = {(v, u) for (v, u) in bucket if deg_of[v] < k}
        for pair, du in added.items():
            vertical.setdefault(du, set()).add(pair)
        bucket -= removed
        trace.append((k, len(added), len(removed)))
        if len(added) <= len(removed):
            dt = k - 1
            break
        k += 1
    return dt, trace
