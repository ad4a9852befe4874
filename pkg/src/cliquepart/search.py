"""Exact branch and bound over edge fixations."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .bound import BoundResult, calc_penalty_heuristic, calc_penalty_lp
from .graph import Partition, WeightedGraph, trivial_upper_bound
from .heuristic import initial_solution
from .subnetwork import EXCLUDED, FREE, INCLUDED

EPS_BOUND = 1e-6

INCLUDE = "include"
EXCLUDE = "exclude"


class Contradiction(Exception):
    """A fixation would force some pair both included and excluded."""


class SearchTimeout(Exception):
    pass


class EdgeFixations:
    """Per-pair state: 0 free, 1 included, -1 excluded (symmetric matrix)."""

    __slots__ = ("state",)

    def __init__(self, state: np.ndarray):
        self.state = state

    @classmethod
    def empty(cls, n: int) -> EdgeFixations:
        return cls(np.zeros((n, n), dtype=np.int8))

    @property
    def n(self) -> int:
        return self.state.shape[0]

    def __getitem__(self, pair) -> int:
        i, j = pair
        return int(self.state[i, j])

    def copy(self) -> EdgeFixations:
        return EdgeFixations(self.state.copy())

    def num_fixed(self) -> int:
        return int(np.count_nonzero(np.triu(self.state, k=1)))

    def labels(self) -> np.ndarray:
        """Clusters formed by included pairs; every other pair is split."""
        n = self.n
        labels = -np.ones(n, dtype=np.int64)
        k = 0
        for v in range(n):
            if labels[v] >= 0:
                continue
            labels[v] = k
            labels[self.state[v] == INCLUDED] = k
            k += 1
        return labels

    def is_consistent(self) -> bool:
        """Included pairs form cliques and exclusions respect them."""
        inc = (self.state == INCLUDED).astype(np.int64)
        np.fill_diagonal(inc, 1)
        exc = (self.state == EXCLUDED).astype(np.int64)
        if np.any((inc @ inc > 0) & (inc == 0)):
            return False
        if np.any((inc @ exc > 0) & (exc == 0)):
            return False
        return not np.any((inc > 0) & (exc > 0))

    def allows(self, labels) -> bool:
        labels = np.asarray(labels)
        same = labels[:, None] == labels[None, :]
        bad = ((self.state == INCLUDED) & ~same) | ((self.state == EXCLUDED) & same)
        return not bad.any()


def propagate_transitivity(
    fixations: EdgeFixations, graph: WeightedGraph | None, edge: tuple[int, int], decision: str
) -> EdgeFixations:
    """Fix ``edge`` and close the fixations under transitivity.

    Including (a, b) merges a's and b's included groups and splits each from
    the other's excluded nodes; excluding it splits the two groups.
    Raises ``Contradiction`` if a pair would be forced both ways.
    """
    a, b = edge
    s = fixations.state
    want = INCLUDED if decision == INCLUDE else EXCLUDED
    cur = s[a, b]
    if cur == want:
        return fixations.copy()
    if cur != FREE:
        raise Contradiction(f"pair {edge} already fixed the other way")
    A = np.append(np.flatnonzero(s[a] == INCLUDED), a)
    B = np.append(np.flatnonzero(s[b] == INCLUDED), b)
    out = s.copy()

    def fill(P, Q, value):
        if np.intersect1d(P, Q).size and value == EXCLUDED:
            raise Contradiction("node would be split from itself")
        block = out[np.ix_(P, Q)]
        if np.any(block == -value):
            raise Contradiction("pair forced both ways")
        out[np.ix_(P, Q)] = value
        out[np.ix_(Q, P)] = value

    if want == INCLUDED:
        X = np.flatnonzero(s[a] == EXCLUDED)
        Y = np.flatnonzero(s[b] == EXCLUDED)
        fill(A, B, INCLUDED)
        fill(A, Y, EXCLUDED)
        fill(B, X, EXCLUDED)
    else:
        fill(A, B, EXCLUDED)
    np.fill_diagonal(out, 0)
    return EdgeFixations(out)


def order_positive_edges(graph: WeightedGraph) -> list[tuple[int, int]]:
    """Positive edges, heaviest first; ties by ascending ``(i, j)``."""
    iu, ju = graph.pairs()
    x = graph.w[iu, ju]
    keep = x > 0
    iu, ju, x = iu[keep], ju[keep], x[keep]
    idx = np.lexsort((ju, iu, -x))
    return [(int(iu[k]), int(ju[k])) for k in idx]


@dataclass
class SearchConfig:
    seed: int = 0
    lp_period: int = 4
    use_stars: bool = False
    time_limit_s: float | None = None
    heuristic_attempts: int = 3
    eps_bound: float = EPS_BOUND
    star_cap: int | None = None


@dataclass
class SearchStats:
    nodes: int = 0
    lp_solves: int = 0
    heuristic_solves: int = 0
    elapsed: float = 0.0


@dataclass
class SolveReport:
    partition: Partition
    q_opt: float
    q_trivial: float
    q_min: float  # score of the initial heuristic partition
    q_max: float  # best bound available at the root
    nodes: int
    lp_solves: int
    heuristic_solves: int
    elapsed: float
    status: str = "optimal"  # or "timeout"
    closed_by: str = "search"  # "heuristic", "lp" or "search"
    history: list[tuple[str, float]] = field(default_factory=list)

    def summary(self) -> str:
        clusters = " ".join(
            "{" + ",".join(str(v + 1) for v in c) + "}" for c in self.partition.clusters()
        )
        return "\n".join(
            [
                f"status      {self.status}",
                f"Q_opt       {_num(self.q_opt)}",
                f"Q_trivial   {_num(self.q_trivial)}",
                f"Q_min       {_num(self.q_min)}",
                f"Q_max       {_num(self.q_max)}",
                f"nodes       {self.nodes}",
                f"lp_solves   {self.lp_solves}",
                f"time_s      {self.elapsed:.3f}",
                f"closed_by   {self.closed_by}",
                f"partition   {clusters}",
            ]
        )


def _num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else f"{x:.6f}"


class BranchAndBound:
    """Depth-first search state for one instance."""

    def __init__(self, graph: WeightedGraph, config: SearchConfig | None = None):
        self.graph = graph
        self.config = config or SearchConfig()
        self.q_trivial = trivial_upper_bound(graph)
        self.order = order_positive_edges(graph)
        self.stats = SearchStats()
        self.incumbent: Partition | None = None
        self.rng = np.random.default_rng([self.config.seed, 2])
        self._deadline = None
        self.bound_trace: list[tuple[int, float]] = []

    @property
    def q_min(self) -> float:
        return self.incumbent.score

    def worth_branching(self, bound: float) -> bool:
        """Branch only if the bound can beat the incumbent."""
        eps = self.config.eps_bound
        if self.graph.integral:
            return math.floor(bound + eps) >= self.q_min + 1
        return bound > self.q_min + eps

    def _check_time(self):
        if self._deadline is not None and time.perf_counter() > self._deadline:
            raise SearchTimeout

    def bound(self, fix: EdgeFixations, chains, depth: int) -> BoundResult:
        if depth % self.config.lp_period == 0:
            self.stats.lp_solves += 1
            return calc_penalty_lp(self.graph, fix, extra_chains=chains, rng=self.rng)
        self.stats.heuristic_solves += 1
        return calc_penalty_heuristic(self.graph, fix, chains, rng=self.rng)

    def recursive_branching(self, e: int, fix: EdgeFixations, chains, depth: int) -> None:
        L = self.order
        while e < len(L) and fix.state[L[e]] != FREE:
            e += 1
        if e >= len(L):
            # remaining free pairs are non-positive: leave them split
            cand = Partition.of(self.graph, fix.labels())
            if cand.score > self.incumbent.score:
                self.incumbent = cand
            return
        for decision in (INCLUDE, EXCLUDE):
            self._check_time()
            try:
                child = propagate_transitivity(fix, self.graph, L[e], decision)
            except Contradiction:
                continue
            self.stats.nodes += 1
            res = self.bound(child, chains, depth)
            self.bound_trace.append((depth, res.upper_bound))
            if self.worth_branching(res.upper_bound):
                self.recursive_branching(e + 1, child, res.chains, depth + 1)

    def solve(self) -> SolveReport:
        cfg = self.config
        start = time.perf_counter()
        if cfg.time_limit_s is not None:
            self._deadline = start + cfg.time_limit_s
        g = self.graph
        self.incumbent = initial_solution(g, seed=cfg.seed)
        q_min0 = self.incumbent.score
        history = [("trivial", self.q_trivial), ("initial", q_min0)]
        q_max = self.q_trivial
        closed_by = None
        empty = EdgeFixations.empty(g.n)

        if not self.worth_branching(self.q_trivial):
            closed_by = "trivial"
        for attempt in range(cfg.heuristic_attempts if closed_by is None else 0):
            res = calc_penalty_heuristic(
                g, None, (), rng=np.random.default_rng([cfg.seed, 1, attempt])
            )
            self.stats.heuristic_solves += 1
            q_max = min(q_max, res.upper_bound)
            history.append((f"heuristic{attempt + 1}", res.upper_bound))
            if not self.worth_branching(res.upper_bound):
                closed_by = "heuristic"
                break
        status = "optimal"
        if closed_by is None:
            closed_by = "search"
            try:
                self._check_time()
                res = calc_penalty_lp(g, None, use_stars=cfg.use_stars, star_cap=cfg.star_cap)
                self.stats.lp_solves += 1
                q_max = min(q_max, res.upper_bound)
                history.append(("lp", res.upper_bound))
                if not self.worth_branching(res.upper_bound):
                    closed_by = "lp"
                else:
                    self._check_time()
                    self.recursive_branching(0, empty, res.chains, 1)
            except SearchTimeout:
                status = "timeout"
        self.stats.elapsed = time.perf_counter() - start
        return SolveReport(
            partition=self.incumbent,
            q_opt=self.incumbent.score,
            q_trivial=self.q_trivial,
            q_min=q_min0,
            q_max=q_max,
            nodes=self.stats.nodes,
            lp_solves=self.stats.lp_solves,
            heuristic_solves=self.stats.heuristic_solves,
            elapsed=self.stats.elapsed,
            status=status,
            closed_by=closed_by,
            history=history,
        )


def recursive_branching(graph, state: BranchAndBound, fixations, chains, e=0, depth=1):
    """Functional entry point: explore below ``fixations`` and return the incumbent."""
    state.recursive_branching(e, fixations, chains, depth)
    return state.incumbent, state.incumbent.score


def branch_and_bound(graph: WeightedGraph, config: SearchConfig | None = None) -> SolveReport:
    """Solve the clique partitioning problem exactly."""
    return BranchAndBound(graph, config).solve()
