"""Linear programming: a dense revised simplex and the two LP builders.

``solve_lp`` maximises ``c @ x`` subject to ``A @ x <= b`` and per-variable
bounds ``lo <= x <= hi``. The penalty LP (one column per subnetwork, one
row per constrained edge) and the triangle-inequality relaxation of the
clique partitioning ILP are both built here.
"""

from __future__ import annotations

import enum
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg.blas import dger

from .graph import WeightedGraph

log = logging.getLogger(__name__)

FEAS_TOL = 1e-9
OPT_TOL = 1e-7
PIVOT_TOL = 1e-9
MAX_ITER = 1_000_000
REFACTOR_EVERY = 50
BLAND_AFTER = 50


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    FAILED = "failed"


class LpSizeError(ValueError):
    pass


@dataclass
class LpProblem:
    """``max c x  s.t.  A x <= b,  lo <= x <= hi``.

    ``A`` may be given dense or as any scipy sparse matrix; it is stored
    in compressed-column form.
    """

    c: np.ndarray
    A: sp.csc_array
    b: np.ndarray
    lo: np.ndarray | None = None
    hi: np.ndarray | None = None
    columns: list = field(default_factory=list)  # what each variable stands for
    rows: list = field(default_factory=list)  # what each constraint stands for

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=np.float64).reshape(-1)
        nvar = self.c.shape[0]
        self.b = np.asarray(self.b, dtype=np.float64).reshape(-1)
        if sp.issparse(self.A):
            A = sp.csc_array(self.A, dtype=np.float64)
        else:
            A = sp.csc_array(np.asarray(self.A, dtype=np.float64).reshape(self.b.shape[0], nvar))
        if A.shape != (self.b.shape[0], nvar):
            raise ValueError(f"A has shape {A.shape}, expected {(self.b.shape[0], nvar)}")
        self.A = A
        self.lo = np.zeros(nvar) if self.lo is None else np.asarray(self.lo, dtype=np.float64)
        self.hi = np.full(nvar, np.inf) if self.hi is None else np.asarray(self.hi, dtype=np.float64)

    @property
    def num_vars(self) -> int:
        return self.c.shape[0]

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]

    @classmethod
    def from_rows(
        cls,
        c: Sequence[float],
        rows: Sequence[tuple[Sequence[tuple[int, float]], float]],
        lo=None,
        hi=None,
    ) -> LpProblem:
        """Build from sparse rows ``([(var, coef), ...], rhs)``."""
        c = np.asarray(c, dtype=np.float64)
        ri, ci, vals = [], [], []
        b = np.zeros(len(rows))
        for r, (coefs, rhs) in enumerate(rows):
            for j, a in coefs:
                ri.append(r)
                ci.append(j)
                vals.append(a)
            b[r] = rhs
        A = sp.coo_array((vals, (ri, ci)), shape=(len(rows), c.shape[0]))
        return cls(c, A, b, lo, hi)


@dataclass
class LpSolution:
    status: LpStatus
    value: float = float("nan")
    x: np.ndarray | None = None
    duals: np.ndarray | None = None  # one per row of the original A
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def _rank_one_update(M: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``M - outer(u, v)``, in place for Fortran-ordered ``M``."""
    return dger(-1.0, u, v, a=M, overwrite_a=True)


class _Simplex:
    """Revised simplex on ``max c x, T x = rhs, x >= 0`` from a feasible basis.

    ``T`` is sparse (CSC); the basis inverse is kept dense and updated by
    rank-one (eta) steps, with a full refactorisation every
    ``REFACTOR_EVERY`` pivots.
    """

    def __init__(self, T: sp.csc_array, rhs, c, basis, banned, max_iter):
        self.T = T
        self.TT = sp.csr_array(T.T)  # for pricing: d = c - T^T y
        self.m = T.shape[0]
        self.b = rhs
        self.c = c
        self.basis = np.array(basis, dtype=np.int64)
        self.banned = banned
        self.max_iter = max_iter
        self.iterations = 0
        self.refactor()

    def column(self, q: int) -> np.ndarray:
        T = self.T
        lo, hi = T.indptr[q], T.indptr[q + 1]
        col = np.zeros(self.m)
        col[T.indices[lo:hi]] = T.data[lo:hi]
        return col

    def refactor(self):
        # Basic columns with a single nonzero (slacks, artificials) are
        # eliminated directly; only the remaining block is inverted.
        T, m = self.T, self.m
        nnz = T.indptr[self.basis + 1] - T.indptr[self.basis]
        single = nnz == 1
        pos_s = np.flatnonzero(single)
        pos_k = np.flatnonzero(~single)
        rows_s = T.indices[T.indptr[self.basis[pos_s]]]
        vals_s = T.data[T.indptr[self.basis[pos_s]]]
        free = np.ones(m, dtype=bool)
        free[rows_s] = False
        rows_q = np.flatnonzero(free)
        Bk = np.column_stack([self.column(q) for q in self.basis[pos_k]]) if pos_k.size else np.zeros((m, 0))
        Binv = np.zeros((m, m))
        if rows_q.size != pos_k.size:
            Binv = np.linalg.inv(np.column_stack([self.column(q) for q in self.basis]))
        else:
            if pos_k.size:
                Binv[np.ix_(pos_k, rows_q)] = np.linalg.inv(Bk[rows_q])
            top = -(Bk[rows_s] @ Binv[pos_k]) if pos_k.size else np.zeros((pos_s.size, m))
            top[np.arange(pos_s.size), rows_s] += 1.0
            Binv[pos_s] = top / vals_s[:, None]
        self.Binv = np.asfortranarray(Binv)
        self.xB = self.Binv @ self.b
        self.xB[np.abs(self.xB) < FEAS_TOL] = 0.0

    def run(self, c=None) -> LpStatus:
        if c is not None:
            self.c = c
        c = self.c
        T = self.T
        tol = OPT_TOL * 1e-2 * max(1.0, float(np.abs(c).max(initial=0.0)))
        streak = 0
        since_refactor = 0
        y = c[self.basis] @ self.Binv
        while True:
            if self.iterations >= self.max_iter:
                return LpStatus.FAILED
            self.iterations += 1
            since_refactor += 1
            if since_refactor >= REFACTOR_EVERY:
                self.refactor()
                y = c[self.basis] @ self.Binv
                since_refactor = 0
            d = c - self.TT @ y
            d[self.basis] = 0.0
            d[self.banned] = 0.0
            if streak > BLAND_AFTER:
                cand = np.flatnonzero(d > tol)
                if cand.size == 0:
                    return LpStatus.OPTIMAL
                q = int(cand[0])
            else:
                q = int(np.argmax(d))
                if d[q] <= tol:
                    return LpStatus.OPTIMAL
            lo, hi = T.indptr[q], T.indptr[q + 1]
            u = self.Binv[:, T.indices[lo:hi]] @ T.data[lo:hi]
            pos = np.flatnonzero(u > PIVOT_TOL)
            if pos.size == 0:
                return LpStatus.UNBOUNDED
            ratios = self.xB[pos] / u[pos]
            tmin = ratios.min()
            ties = pos[ratios <= tmin + 1e-12]
            r = int(ties[np.argmin(self.basis[ties])])
            t = max(self.xB[r] / u[r], 0.0)
            self.xB -= t * u
            self.xB[r] = t
            self.xB[np.abs(self.xB) < FEAS_TOL] = 0.0
            prow = self.Binv[r] / u[r]
            self.Binv = _rank_one_update(self.Binv, u, prow)
            self.Binv[r] = prow
            y = y + d[q] * prow
            self.basis[r] = q
            streak = streak + 1 if t <= 1e-12 else 0

    def duals(self) -> np.ndarray:
        return self.c[self.basis] @ self.Binv

    def primal(self, N: int) -> np.ndarray:
        x = np.zeros(N)
        x[self.basis] = self.xB
        return x


def solve_lp(problem: LpProblem, max_iter: int = MAX_ITER) -> LpSolution:
    """Maximise a bounded LP with a deterministic two-phase revised simplex."""
    c0, A0, b0 = problem.c, problem.A, problem.b
    lo, hi = problem.lo, problem.hi
    nvar = problem.num_vars
    if np.any(~np.isfinite(lo)):
        raise ValueError("lower bounds must be finite")
    if np.any(hi < lo):
        return LpSolution(LpStatus.INFEASIBLE)
    if nvar == 0:
        if np.any(b0 < -FEAS_TOL):
            return LpSolution(LpStatus.INFEASIBLE)
        return LpSolution(LpStatus.OPTIMAL, 0.0, np.zeros(0), np.zeros(problem.num_rows))

    # shift to x' = x - lo >= 0, add finite upper bounds as rows
    b = b0 - A0 @ lo
    ub = np.flatnonzero(np.isfinite(hi))
    A = A0
    if ub.size:
        E = sp.csc_array((np.ones(ub.size), (np.arange(ub.size), ub)), shape=(ub.size, nvar))
        A = sp.vstack([A0, E], format="csc")
        b = np.concatenate([b, hi[ub] - lo[ub]])
    m = A.shape[0]
    if m == 0:
        if np.any(c0 > 0):
            return LpSolution(LpStatus.UNBOUNDED)
        return LpSolution(LpStatus.OPTIMAL, float(c0 @ lo), lo.copy(), np.zeros(0))

    neg = b < 0
    sign = np.where(neg, -1.0, 1.0)
    k = int(neg.sum())
    # columns: x' | slacks | artificials
    art_rows = np.flatnonzero(neg)
    S = sp.csc_array((np.ones(k), (art_rows, np.arange(k))), shape=(m, k))
    D = sp.diags_array(sign)
    T = sp.hstack([D @ A, D, S], format="csc")
    T.sort_indices()
    rhs = sign * b
    N = T.shape[1]
    basis = np.arange(nvar, nvar + m)
    basis[art_rows] = nvar + m + np.arange(k)
    banned = np.zeros(N, dtype=bool)

    cost = np.concatenate([c0, np.zeros(m + k)])
    if k:
        c1 = np.zeros(N)
        c1[nvar + m:] = -1.0
        sx = _Simplex(T, rhs, c1, basis, banned, max_iter)
        status = sx.run()
        if status is LpStatus.FAILED:
            return LpSolution(LpStatus.FAILED, iterations=sx.iterations)
        if sx.xB[sx.basis >= nvar + m].sum() > FEAS_TOL * max(1.0, np.abs(rhs).max()):
            return LpSolution(LpStatus.INFEASIBLE, iterations=sx.iterations)
        banned[nvar + m:] = True
        # pivot zero-level artificials out of the basis where possible
        for r in np.flatnonzero(sx.basis >= nvar + m):
            row = sx.TT[: nvar + m] @ sx.Binv[r]
            cand = np.flatnonzero(np.abs(row) > PIVOT_TOL)
            cand = cand[~np.isin(cand, sx.basis)]
            if cand.size:
                sx.basis[r] = cand[0]
                sx.refactor()
        status = sx.run(cost)
    else:
        sx = _Simplex(T, rhs, cost, basis, banned, max_iter)
        status = sx.run()
    if status is not LpStatus.OPTIMAL:
        return LpSolution(status, iterations=sx.iterations)

    sx.refactor()
    xfull = sx.primal(N)
    x = lo + np.maximum(xfull[:nvar], 0.0)
    x = np.minimum(x, hi)
    y = sx.duals() * sign
    duals = y[: problem.num_rows]
    value = float(c0 @ x)
    viol = A0 @ x - b0
    if viol.size and viol.max() > OPT_TOL * (1.0 + np.abs(b0).max()):
        log.warning("LP solution violates constraints by %g", viol.max())
        return LpSolution(LpStatus.FAILED, iterations=sx.iterations)
    return LpSolution(LpStatus.OPTIMAL, value, x, duals, sx.iterations)


def format_lp(problem: LpProblem) -> str:
    """Readable LP dump: objective line, one constraint per line, bounds."""

    def term(a, j):
        return f"{a:+.12g} x{j}"

    lines = ["max: " + " ".join(term(a, j) for j, a in enumerate(problem.c) if a != 0) + " ;"]
    lines.append("subject to")
    A = sp.csr_array(problem.A)
    A.sort_indices()
    for r in range(problem.num_rows):
        lo, hi = A.indptr[r], A.indptr[r + 1]
        body = " ".join(term(a, j) for j, a in zip(A.indices[lo:hi], A.data[lo:hi]) if a != 0)
        lines.append(f"c{r}: {body} <= {problem.b[r]:.12g} ;")
    lines.append("bounds")
    for j in range(problem.num_vars):
        lines.append(f"{problem.lo[j]:.12g} <= x{j} <= {problem.hi[j]:.12g} ;")
    return "\n".join(lines) + "\n"


# --- builders ----------------------------------------------------------------


def build_penalty_lp(graph: WeightedGraph, subnetworks, fixations=None) -> LpProblem:
    """Penalty LP: maximise the summed penalties within edge capacities.

    Subnetworks through an included negative or excluded positive edge are
    dropped (that loss is already charged to the fixation penalty). Edges
    fixed included-positive or excluded-negative get no capacity row.
    ``problem.columns`` lists the subnetworks kept, in order.
    """
    w = graph.w
    fix = None if fixations is None else np.asarray(getattr(fixations, "state", fixations))
    kept = []
    uses = []
    rowid: dict[tuple[int, int], int] = {}
    for sub in subnetworks:
        edges = []
        ok = True
        for i, j, _ in sub.signed_edges():
            f = 0 if fix is None else fix[i, j]
            if f == 0:
                edges.append((i, j))
            elif (f == 1 and w[i, j] < 0) or (f == -1 and w[i, j] > 0):
                ok = False
                break
        if not ok or not edges:
            continue
        kept.append(sub)
        uses.append(edges)
        for e in edges:
            rowid.setdefault(e, 0)
    order = sorted(rowid)
    for r, e in enumerate(order):
        rowid[e] = r
    ri, ci, vals = [], [], []
    for k, (sub, edges) in enumerate(zip(kept, uses)):
        for e in edges:
            ri.append(rowid[e])
            ci.append(k)
            vals.append(sub.magnitude)
    A = sp.coo_array((vals, (ri, ci)), shape=(len(order), len(kept)))
    b = np.array([abs(w[i, j]) for i, j in order], dtype=np.float64)
    c = np.array([sub.penalty for sub in kept], dtype=np.float64)
    return LpProblem(c, A, b, columns=kept, rows=order)


RELAXED_ILP_CAP = 40


def build_relaxed_ilp(graph: WeightedGraph, cap: int = RELAXED_ILP_CAP) -> LpProblem:
    """Triangle-inequality LP relaxation with ``0 <= x_ij <= 1``."""
    n = graph.n
    if n > cap:
        raise LpSizeError(f"relaxed ILP limited to n <= {cap} (got {n})")
    iu, ju = np.triu_indices(n, k=1)
    index = -np.ones((n, n), dtype=np.int64)
    index[iu, ju] = np.arange(iu.size)
    tri = np.array(
        [(index[i, j], index[j, k], index[i, k])
         for i in range(n) for j in range(i + 1, n) for k in range(j + 1, n)],
        dtype=np.int64,
    ).reshape(-1, 3)
    nvar = iu.size
    t = tri.shape[0]
    signs = np.array([(1, 1, -1), (1, -1, 1), (-1, 1, 1)], dtype=np.float64)
    ri = np.repeat(np.arange(3 * t), 3)
    ci = np.repeat(tri, 3, axis=0).reshape(-1)
    vals = np.tile(signs.reshape(-1), t)
    A = sp.coo_array((vals, (ri, ci)), shape=(3 * t, nvar))
    b = np.ones(3 * t)
    c = graph.w[iu, ju].copy()
    return LpProblem(c, A, b, np.zeros(nvar), np.ones(nvar), columns=list(zip(iu, ju)))


def relaxed_upper_bound(graph: WeightedGraph, cap: int = RELAXED_ILP_CAP) -> float:
    """Upper bound on partition quality from the LP relaxation."""
    sol = solve_lp(build_relaxed_ilp(graph, cap))
    if not sol.optimal:
        raise RuntimeError(f"relaxed ILP not solved: {sol.status.value}")
    return sol.value + graph.loop_offset
