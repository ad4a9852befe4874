"""Penalizing subnetworks: chains, stars and their linear combinations.

A subnetwork is stored in reduced form: every participating edge carries
the same magnitude ``p`` with the sign of the source edge. A chain's
penalty is ``p``; a star's penalty is ``2p``.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .graph import WeightedGraph

EPS = 1e-9

FREE, INCLUDED, EXCLUDED = 0, 1, -1


class InvalidChainError(ValueError):
    pass


def _pair(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


def _fixmat(n: int, fixations) -> np.ndarray:
    if fixations is None:
        return np.zeros((n, n), dtype=np.int8)
    state = getattr(fixations, "state", fixations)
    return np.ascontiguousarray(state, dtype=np.int8)


@dataclass(frozen=True)
class Chain:
    """Positive path ``nodes[0] - ... - nodes[-1]`` closed by a negative edge."""

    nodes: tuple[int, ...]
    penalty: float

    def __post_init__(self):
        nodes = tuple(int(v) for v in self.nodes)
        if len(nodes) < 3 or len(set(nodes)) != len(nodes):
            raise InvalidChainError("a chain needs at least 3 distinct nodes")
        if not self.penalty > 0:
            raise InvalidChainError("chain penalty must be positive")
        if nodes[0] > nodes[-1]:
            nodes = nodes[::-1]
        object.__setattr__(self, "nodes", nodes)

    @property
    def magnitude(self) -> float:
        return self.penalty

    @property
    def closing_edge(self) -> tuple[int, int]:
        return _pair(self.nodes[0], self.nodes[-1])

    def path_edges(self) -> list[tuple[int, int]]:
        return [_pair(a, b) for a, b in zip(self.nodes, self.nodes[1:])]

    def signed_edges(self) -> list[tuple[int, int, int]]:
        """``(i, j, sign)`` for every edge, ``i < j``."""
        out = [(i, j, 1) for i, j in self.path_edges()]
        i, j = self.closing_edge
        out.append((i, j, -1))
        return out

    def scaled(self, factor: float) -> Chain:
        return Chain(self.nodes, self.penalty * factor)

    def as_graph(self, n: int) -> WeightedGraph:
        return _reduced_graph(self, n)


@dataclass(frozen=True)
class Star:
    """Hub joined by three node-disjoint positive paths to a negative triangle.

    ``paths[t]`` runs from the hub to ``terminals[t]``.
    """

    terminals: tuple[int, int, int]
    hub: int
    paths: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    p: float

    @property
    def penalty(self) -> float:
        return 2.0 * self.p

    @property
    def magnitude(self) -> float:
        return self.p

    @property
    def nodes(self) -> tuple[int, ...]:
        seen = {self.hub: None}
        for path in self.paths:
            for v in path:
                seen.setdefault(v, None)
        return tuple(seen)

    def signed_edges(self) -> list[tuple[int, int, int]]:
        out = []
        for path in self.paths:
            out.extend((*_pair(a, b), 1) for a, b in itertools.pairwise(path))
        i, j, k = self.terminals
        out.extend((*_pair(a, b), -1) for a, b in ((i, j), (j, k), (i, k)))
        return out

    def as_graph(self, n: int) -> WeightedGraph:
        return _reduced_graph(self, n)


Subnetwork = Chain | Star


def _reduced_graph(sub: Subnetwork, n: int) -> WeightedGraph:
    w = np.zeros((n, n))
    for i, j, s in sub.signed_edges():
        w[i, j] = w[j, i] = s * sub.magnitude
    return WeightedGraph(w)


def chain_penalty(path_weights: Sequence[float], closing_weight: float) -> float:
    """Penalty of a chain: the smallest magnitude among all its edges."""
    if len(path_weights) < 2:
        raise InvalidChainError("a chain needs at least two path edges")
    if any(x <= 0 for x in path_weights):
        raise InvalidChainError("path edges must be strictly positive")
    if closing_weight >= 0:
        raise InvalidChainError("closing edge must be strictly negative")
    return float(min(min(path_weights), -closing_weight))


def reduce_chain(weights: np.ndarray, nodes: Sequence[int]) -> Chain:
    """Reduced chain over ``nodes`` using the weights (or residuals) given."""
    w = getattr(weights, "w", weights)
    path = [w[a, b] for a, b in itertools.pairwise(nodes)]
    return Chain(tuple(nodes), chain_penalty(path, w[nodes[0], nodes[-1]]))


def enumerate_chains(
    graph: WeightedGraph, fixations=None, max_nodes: int = 4
) -> list[Chain]:
    """Every valid 3-node (and 4-node) chain, each listed once.

    Path edges must be positive and not excluded; the closing edge negative
    and not included. The penalty is the smallest magnitude over the
    chain's free edges, since fixed edges carry no capacity constraint.
    """
    if max_nodes not in (3, 4):
        raise ValueError("max_nodes must be 3 or 4")
    fix = _fixmat(graph.n, fixations)
    rows = _kernels.enumerate_chains(graph.w, fix, max_nodes, EPS)
    w = graph.w
    out = []
    for row in rows.tolist():
        nodes = tuple(v for v in row if v >= 0)
        p = np.inf
        for a, b in zip(nodes + nodes[:1], nodes[1:] + nodes[:1]):
            if fix[a, b] == FREE:
                p = min(p, abs(w[a, b]))
        if not np.isfinite(p):
            continue
        out.append(Chain(nodes, float(p)))
    return out


def shortest_positive_path(
    graph: WeightedGraph,
    residual: np.ndarray | None,
    u: int,
    v: int,
    max_len: int | None = None,
    fixations=None,
    blocked: Sequence[int] = (),
) -> list[int] | None:
    """Minimum-hop path over edges with positive residual weight.

    Ties between equally short paths go to the smallest intermediate
    indices. ``blocked`` nodes may not appear inside the path.
    """
    if u == v:
        raise ValueError("endpoints must differ")
    r = np.ascontiguousarray(graph.w if residual is None else residual, dtype=np.float64)
    fix = _fixmat(graph.n, fixations)
    if max_len is None:
        max_len = graph.n - 1
    mask = None
    if blocked:
        mask = np.zeros(graph.n, dtype=np.int8)
        mask[list(blocked)] = 1
    return _kernels.bfs_path(r, fix, u, v, max_len, EPS, mask)


def find_stars(
    graph: WeightedGraph, cap: int | None = None, residual: np.ndarray | None = None
) -> list[Star]:
    """Penalizing stars, at most one per (negative triangle, hub).

    Paths are shortest positive paths that avoid the other two terminals;
    a star is kept when the three paths share no node besides the hub.
    The list is truncated to ``cap`` (default ``50 * n``) keeping larger
    ``p`` first.
    """
    n = graph.n
    w = graph.w
    r = np.ascontiguousarray(w if residual is None else residual, dtype=np.float64)
    fix = np.zeros((n, n), dtype=np.int8)
    if cap is None:
        cap = 50 * n
    stars = []
    mask = np.zeros(n, dtype=np.int8)
    for i in range(n):
        for j in range(i + 1, n):
            if not r[i, j] < -EPS:
                continue
            for k in range(j + 1, n):
                if not (r[i, k] < -EPS and r[j, k] < -EPS):
                    continue
                terms = (i, j, k)
                for m in range(n):
                    if m in terms:
                        continue
                    paths = []
                    for t in terms:
                        mask[:] = 0
                        mask[[x for x in terms if x != t]] = 1
                        path = _kernels.bfs_path(r, fix, m, t, n - 1, EPS, mask)
                        if path is None:
                            break
                        paths.append(tuple(path))
                    if len(paths) < 3:
                        continue
                    inner = [set(path[1:]) for path in paths]
                    if inner[0] & inner[1] or inner[0] & inner[2] or inner[1] & inner[2]:
                        continue
                    mags = [-r[i, j], -r[j, k], -r[i, k]]
                    for path in paths:
                        mags.extend(r[a, b] for a, b in itertools.pairwise(path))
                    stars.append(Star(terms, m, tuple(paths), float(min(mags))))
    stars.sort(key=lambda s: -s.p)  # stable: ties keep enumeration order
    return stars[:cap]


@dataclass
class PenaltyModel:
    """Nonnegative combination of subnetworks."""

    terms: list[tuple[Subnetwork, float]] = field(default_factory=list)

    def add(self, sub: Subnetwork, lam: float = 1.0) -> None:
        if lam < 0:
            raise ValueError("multipliers must be nonnegative")
        self.terms.append((sub, float(lam)))

    @property
    def total_penalty(self) -> float:
        return float(sum(lam * sub.penalty for sub, lam in self.terms))

    def combined_weights(self, n: int) -> np.ndarray:
        """Weights of the linear combination as an ``n x n`` matrix."""
        out = np.zeros((n, n))
        for sub, lam in self.terms:
            for i, j, s in sub.signed_edges():
                out[i, j] += s * lam * sub.magnitude
                out[j, i] = out[i, j]
        return out

    def residual(self, graph: WeightedGraph) -> np.ndarray:
        """Remaining edge capacity ``|w| - |combined|`` (signed as usage allows)."""
        return np.abs(graph.w) - np.abs(self.combined_weights(graph.n))

    def chains(self) -> list[Chain]:
        """Chains scaled by their multipliers (penalty ``lambda * p``)."""
        return [
            sub.scaled(lam) for sub, lam in self.terms if isinstance(sub, Chain) and lam > 0
        ]


def is_permissible(model: PenaltyModel, graph: WeightedGraph, fixations=None) -> bool:
    """Whether the combination fits inside the graph's weights, sign by sign.

    With ``fixations``, edges fixed as included-positive or excluded-negative
    are exempt from the magnitude limit.
    """
    n = graph.n
    if any(lam < 0 for _, lam in model.terms):
        return False
    comb = model.combined_weights(n)
    w = graph.w
    exempt = np.zeros((n, n), dtype=bool)
    if fixations is not None:
        fix = _fixmat(n, fixations)
        exempt = ((fix == INCLUDED) & (w > 0)) | ((fix == EXCLUDED) & (w < 0))
    iu = np.triu_indices(n, k=1)
    c, x, ex = comb[iu], w[iu], exempt[iu]
    if np.any(c * x < -EPS):
        return False
    over = np.abs(c) > np.abs(x) + EPS
    return not np.any(over & ~ex)
