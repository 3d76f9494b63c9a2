"""Compiled inner loops over CSR adjacency (``indptr``, ``indices``)."""
import numpy as np
from numba import njit


@njit(cache=True)
def bfs_distances(indptr, indices, source):
    n = indptr.size - 1
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    dist[source] = 0
    queue[0] = source
    head, tail = 0, 1
    while head < tail:
        v = queue[head]
        head += 1
        for j in range(indptr[v], indptr[v + 1]):
            w = indices[j]
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue[tail] = w
                tail += 1
    return dist


@njit(cache=True)
def distance_histogram(indptr, indices, sources):
    """Counts of BFS distances (index = length) summed over ``sources``."""
    n = indptr.size - 1
    hist = np.zeros(n + 1, dtype=np.int64)
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for s in sources:
        dist[s] = 0
        queue[0] = s
        head, tail = 0, 1
        while head < tail:
            v = queue[head]
            head += 1
            hist[dist[v]] += 1
            for j in range(indptr[v], indptr[v + 1]):
                w = indices[j]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue[tail] = w
                    tail += 1
        for i in range(tail):
            dist[queue[i]] = -1
    return hist


@njit(cache=True)
def brandes_dependency(indptr, indices, target):
    """Sum over all sources s != target of the Brandes dependency delta_s(target)."""
    n = indptr.size - 1
    dist = np.full(n, -1, dtype=np.int64)
    sigma = np.zeros(n, dtype=np.float64)
    delta = np.zeros(n, dtype=np.float64)
    order = np.empty(n, dtype=np.int64)
    total = 0.0
    for s in range(n):
        if s == target:
            continue
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head, tail = 0, 1
        while head < tail:
            v = order[head]
            head += 1
            for j in range(indptr[v], indptr[v + 1]):
                w = indices[j]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    order[tail] = w
                    tail += 1
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        # accumulate in reverse BFS order
        for i in range(tail - 1, 0, -1):
            w = order[i]
            coeff = (1.0 + delta[w]) / sigma[w]
            for j in range(indptr[w], indptr[w + 1]):
                v = indices[j]
                if dist[v] == dist[w] - 1:
                    delta[v] += sigma[v] * coeff
        total += delta[target]
        for i in range(tail):
            v = order[i]
            dist[v] = -1
            sigma[v] = 0.0
            delta[v] = 0.0
    return total


@njit(cache=True)
def neighbor_links(indptr, indices):
    """Per node, the number of edges among its neighbours."""
    n = indptr.size - 1
    links = np.zeros(n, dtype=np.int64)
    mark = np.zeros(n, dtype=np.bool_)
    for v in range(n):
        for j in range(indptr[v], indptr[v + 1]):
            mark[indices[j]] = True
        count = 0
        for j in range(indptr[v], indptr[v + 1]):
            u = indices[j]
            for k in range(indptr[u], indptr[u + 1]):
                if mark[indices[k]]:
                    count += 1
        links[v] = count // 2
        for j in range(indptr[v], indptr[v + 1]):
            mark[indices[j]] = False
    return links


@njit(cache=True)
def closed_four_walk_weight(indptr, indices):
    """trace(P^4) for the random-walk matrix P = D^-1 A.

    Row v of the symmetric M^2 (M = D^-1/2 A D^-1/2) is built in a scratch
    vector from v's 2-walks; its squared norm is that row's share of
    trace(M^4) = trace(P^4).  Isolated nodes count 1 each.
    """
    n = indptr.size - 1
    deg = np.empty(n, dtype=np.float64)
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
    acc = np.zeros(n, dtype=np.float64)
    touched = np.empty(n, dtype=np.int64)
    total = 0.0
    for v in range(n):
        if deg[v] == 0:
            total += 1.0
            continue
        nt = 0
        for j in range(indptr[v], indptr[v + 1]):
            u = indices[j]
            wu = 1.0 / deg[u]
            for k in range(indptr[u], indptr[u + 1]):
                w = indices[k]
                if acc[w] == 0.0:
                    touched[nt] = w
                    nt += 1
                acc[w] += wu
        row = 0.0
        for i in range(nt):
            w = touched[i]
            row += acc[w] * acc[w] / deg[w]
            acc[w] = 0.0
        total += row / deg[v]
    return total
