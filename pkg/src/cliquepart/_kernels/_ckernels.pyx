# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops; see ``_pykernels`` for semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def enumerate_chains(const double[:, ::1] w, const signed char[:, ::1] fix, int max_nodes, double eps):
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t a, b, c, d, k, nm
    cdef list out = []
    cdef cnp.ndarray[cnp.int64_t, ndim=1] mids_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] mids = mids_arr
    for a in range(n):
        for d in range(a + 1, n):
            if not (w[a, d] < -eps and fix[a, d] != 1):
                continue
            nm = 0
            for b in range(n):
                if b != a and b != d and w[a, b] > eps and fix[a, b] != -1:
                    mids[nm] = b
                    nm += 1
            for k in range(nm):
                b = mids[k]
                if w[b, d] > eps and fix[b, d] != -1:
                    out.append((a, b, d, -1))
            if max_nodes >= 4:
                for k in range(nm):
                    b = mids[k]
                    for c in range(n):
                        if c == a or c == b or c == d:
                            continue
                        if (w[b, c] > eps and fix[b, c] != -1
                                and w[c, d] > eps and fix[c, d] != -1):
                            out.append((a, b, c, d))
    if not out:
        return np.empty((0, 4), dtype=np.int64)
    return np.array(out, dtype=np.int64)


cdef list _bfs(const double[:, ::1] r, const signed char[:, ::1] fix, Py_ssize_t u, Py_ssize_t v,
               Py_ssize_t maxlen, double eps, signed char* blocked,
               cnp.int64_t[::1] parent, cnp.int64_t[::1] depth, cnp.int64_t[::1] queue):
    cdef Py_ssize_t n = r.shape[0]
    cdef Py_ssize_t head = 0, tail = 0, x, y
    for x in range(n):
        parent[x] = -2
    parent[u] = -1
    depth[u] = 0
    queue[tail] = u
    tail += 1
    while head < tail:
        x = queue[head]
        head += 1
        if depth[x] >= maxlen:
            continue
        for y in range(n):
            if parent[y] != -2 or y == x:
                continue
            if r[x, y] <= eps or fix[x, y] == -1:
                continue
            if blocked != NULL and blocked[y] and y != v:
                continue
            parent[y] = x
            depth[y] = depth[x] + 1
            if y == v:
                path = [v]
                x = v
                while parent[x] != -1:
                    x = parent[x]
                    path.append(x)
                path.reverse()
                return path
            queue[tail] = y
            tail += 1
    return None


def bfs_path(const double[:, ::1] r, const signed char[:, ::1] fix, Py_ssize_t u, Py_ssize_t v,
             Py_ssize_t maxlen, double eps, blocked=None):
    cdef Py_ssize_t n = r.shape[0]
    parent = np.empty(n, dtype=np.int64)
    depth = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    cdef signed char[::1] bl
    if blocked is None:
        return _bfs(r, fix, u, v, maxlen, eps, NULL, parent, depth, queue)
    bl = np.ascontiguousarray(blocked, dtype=np.int8)
    return _bfs(r, fix, u, v, maxlen, eps, &bl[0], parent, depth, queue)


def has_negative_in_positive_component(const double[:, ::1] r, const signed char[:, ::1] fix, double eps):
    cdef Py_ssize_t n = r.shape[0]
    cdef Py_ssize_t s, x, y, i, j, top
    comp_arr = np.full(n, -1, dtype=np.int64)
    stack_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] comp = comp_arr
    cdef cnp.int64_t[::1] stack = stack_arr
    for s in range(n):
        if comp[s] != -1:
            continue
        comp[s] = s
        top = 0
        stack[top] = s
        top += 1
        while top > 0:
            top -= 1
            x = stack[top]
            for y in range(n):
                if comp[y] == -1 and r[x, y] > eps and fix[x, y] != -1:
                    comp[y] = s
                    stack[top] = y
                    top += 1
    for i in range(n):
        for j in range(i + 1, n):
            if r[i, j] < -eps and fix[i, j] != 1 and comp[i] == comp[j]:
                return True
    return False


def drain_negative_edges(double[:, ::1] r, const signed char[:, ::1] fix, const cnp.int64_t[:, ::1] order,
                         Py_ssize_t maxlen, double eps):
    cdef Py_ssize_t n = r.shape[0]
    cdef Py_ssize_t k, u, v, a, b, t, plen
    cdef double p, total = 0.0
    cdef list found = []
    cdef list path
    parent = np.empty(n, dtype=np.int64)
    depth = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for k in range(order.shape[0]):
        u = order[k, 0]
        v = order[k, 1]
        while r[u, v] < -eps and fix[u, v] != 1:
            path = _bfs(r, fix, u, v, maxlen, eps, NULL, parent, depth, queue)
            if path is None:
                break
            plen = len(path)
            p = -r[u, v]
            for t in range(plen - 1):
                a = path[t]
                b = path[t + 1]
                if fix[a, b] == 0 and r[a, b] < p:
                    p = r[a, b]
            for t in range(plen - 1):
                a = path[t]
                b = path[t + 1]
                if fix[a, b] == 0:
                    r[a, b] -= p
                    r[b, a] -= p
            r[u, v] += p
            r[v, u] += p
            total += p
            found.append((path, p))
    return total, found


cdef class _Rgs:
    cdef Py_ssize_t n
    cdef const double[:, ::1] w
    cdef const signed char[:, ::1] fix
    cdef cnp.int64_t[::1] labels
    cdef cnp.int64_t[::1] best
    cdef cnp.int64_t[:, ::1] members
    cdef cnp.int64_t[::1] size
    cdef double best_score
    cdef bint found
    cdef long long count

    def __init__(self, w, fix):
        self.n = w.shape[0]
        self.w = w
        self.fix = fix
        self.labels = np.zeros(self.n, dtype=np.int64)
        self.best = np.zeros(self.n, dtype=np.int64)
        self.members = np.zeros((self.n, self.n), dtype=np.int64)
        self.size = np.zeros(self.n, dtype=np.int64)
        self.best_score = -INFINITY
        self.found = False
        self.count = 0

    cdef bint consistent(self, Py_ssize_t v, Py_ssize_t c):
        cdef Py_ssize_t u
        cdef signed char f
        for u in range(v):
            f = self.fix[v, u]
            if f == 1 and self.labels[u] != c:
                return False
            if f == -1 and self.labels[u] == c:
                return False
        return True

    cdef void rec(self, Py_ssize_t v, Py_ssize_t nclusters, double score):
        cdef Py_ssize_t c, t, u
        cdef double gain
        if v == self.n:
            self.count += 1
            if score > self.best_score:
                self.best_score = score
                self.found = True
                for t in range(self.n):
                    self.best[t] = self.labels[t]
            return
        for c in range(nclusters + 1):
            if not self.consistent(v, c):
                continue
            gain = 0.0
            for t in range(self.size[c]):
                u = self.members[c, t]
                gain += self.w[v, u]
            self.labels[v] = c
            self.members[c, self.size[c]] = v
            self.size[c] += 1
            self.rec(v + 1, nclusters + (1 if c == nclusters else 0), score + gain)
            self.size[c] -= 1

    def run(self):
        self.labels[0] = 0
        self.members[0, 0] = 0
        self.size[0] = 1
        self.rec(1, 1, 0.0)


def rgs_optimum(const double[:, ::1] w, const signed char[:, ::1] fix, double offset):
    cdef _Rgs e = _Rgs(w, fix)
    e.run()
    if not e.found:
        return None, -np.inf, 0
    return np.asarray(e.best).copy(), offset + e.best_score, e.count
