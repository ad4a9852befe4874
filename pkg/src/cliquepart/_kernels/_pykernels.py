"""Pure-Python reference versions of the hot loops.

Every function here has a twin in ``_ckernels.pyx`` with identical
semantics and identical output ordering. Fixation codes: 0 free,
1 included, -1 excluded.
"""

import itertools
from collections import deque

import numpy as np


def enumerate_chains(w, fix, max_nodes, eps):
    """All 3- and (optionally) 4-node chains, canonical first < last.

    Returns an ``(m, 4)`` int64 array; 3-node chains are padded with -1.
    """
    n = w.shape[0]
    W = w.tolist()
    F = fix.tolist()

    def pos(i, j):
        return W[i][j] > eps and F[i][j] != -1

    out = []
    for a in range(n):
        for d in range(a + 1, n):
            if not (W[a][d] < -eps and F[a][d] != 1):
                continue
            mids = [b for b in range(n) if b != a and b != d and pos(a, b)]
            for b in mids:
                if pos(b, d):
                    out.append((a, b, d, -1))
            if max_nodes >= 4:
                for b in mids:
                    for c in range(n):
                        if c == a or c == b or c == d:
                            continue
                        if pos(b, c) and pos(c, d):
                            out.append((a, b, c, d))
    if not out:
        return np.empty((0, 4), dtype=np.int64)
    return np.array(out, dtype=np.int64)


def bfs_path(r, fix, u, v, maxlen, eps, blocked=None):
    """Minimum-hop path u -> v over usable positive residual edges.

    Neighbours are scanned in ascending index order and the first discoverer
    becomes the parent, so ties resolve towards small intermediate indices.
    Returns a list of nodes or None when no path has at most ``maxlen`` hops.
    """
    n = r.shape[0]
    parent = [-2] * n
    depth = [0] * n
    parent[u] = -1
    queue = deque([u])
    while queue:
        x = queue.popleft()
        if depth[x] >= maxlen:
            continue
        rx = r[x]
        fx = fix[x]
        for y in range(n):
            if parent[y] != -2 or y == x:
                continue
            if rx[y] <= eps or fx[y] == -1:
                continue
            if blocked is not None and blocked[y] and y != v:
                continue
            parent[y] = x
            depth[y] = depth[x] + 1
            if y == v:
                path = [v]
                while parent[path[-1]] != -1:
                    path.append(parent[path[-1]])
                path.reverse()
                return path
            queue.append(y)
    return None


def has_negative_in_positive_component(r, fix, eps):
    """True if some usable negative edge joins two nodes of one positive component."""
    n = r.shape[0]
    comp = [-1] * n
    for s in range(n):
        if comp[s] != -1:
            continue
        comp[s] = s
        stack = [s]
        while stack:
            x = stack.pop()
            for y in range(n):
                if comp[y] == -1 and r[x, y] > eps and fix[x, y] != -1:
                    comp[y] = s
                    stack.append(y)
    for i in range(n):
        for j in range(i + 1, n):
            if r[i, j] < -eps and fix[i, j] != 1 and comp[i] == comp[j]:
                return True
    return False


def drain_negative_edges(r, fix, order, maxlen, eps):
    """Greedy chain extraction over the given negative edges.

    For every edge ``(u, v)`` in ``order``: while its residual is negative,
    take the shortest positive path (at most ``maxlen`` hops), form a chain
    with penalty equal to the smallest residual magnitude among its free
    edges and the closing edge, and subtract it. ``r`` is updated in place.
    Returns ``(total_penalty, [(path, p), ...])``.
    """
    total = 0.0
    found = []
    for k in range(order.shape[0]):
        u = int(order[k, 0])
        v = int(order[k, 1])
        while r[u, v] < -eps and fix[u, v] != 1:
            path = bfs_path(r, fix, u, v, maxlen, eps)
            if path is None:
                break
            p = -r[u, v]
            for a, b in itertools.pairwise(path):
                if fix[a, b] == 0 and r[a, b] < p:
                    p = r[a, b]
            for a, b in itertools.pairwise(path):
                if fix[a, b] == 0:
                    r[a, b] -= p
                    r[b, a] -= p
            r[u, v] += p
            r[v, u] += p
            total += p
            found.append((path, p))
    return total, found


def rgs_optimum(w, fix, offset):
    """Exhaustive maximum over all set partitions consistent with ``fix``.

    Partitions are enumerated as restricted-growth strings in lexicographic
    order; only a strictly better score replaces the incumbent, so the
    lexicographically smallest maximiser is returned.
    Returns ``(labels, score, count)`` where ``count`` is the number of
    consistent partitions visited.
    """
    n = w.shape[0]
    W = w.tolist()
    F = fix.tolist()
    labels = [0] * n
    best = [None, -np.inf]
    count = 0
    # cluster_sums[v][c]: weight from v to nodes < v in cluster c
    members = [[] for _ in range(n)]

    def consistent(v, c):
        Fv = F[v]
        for u in range(v):
            f = Fv[u]
            if f == 1 and labels[u] != c:
                return False
            if f == -1 and labels[u] == c:
                return False
        return True

    def rec(v, nclusters, score):
        nonlocal count
        if v == n:
            count += 1
            if score > best[1]:
                best[0] = labels.copy()
                best[1] = score
            return
        Wv = W[v]
        for c in range(nclusters + 1):
            if not consistent(v, c):
                continue
            gain = 0.0
            for u in members[c]:
                gain += Wv[u]
            labels[v] = c
            members[c].append(v)
            rec(v + 1, nclusters + (c == nclusters), score + gain)
            members[c].pop()

    labels[0] = 0
    members[0].append(0)
    rec(1, 1, 0.0)
    if best[0] is None:
        return None, -np.inf, 0
    return np.array(best[0], dtype=np.int64), offset + best[1], count
