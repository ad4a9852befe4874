"""Upper bounds on partition quality from penalizing subnetworks.

``upper_bound = trivial_upper_bound - P0 - P`` where ``P0`` charges edges
whose fixation forfeits their weight and ``P`` is the penalty of a
permissible combination of chains (and, at the root, stars).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .graph import WeightedGraph, trivial_upper_bound
from .lp import build_penalty_lp, solve_lp
from .subnetwork import (
    EPS,
    EXCLUDED,
    FREE,
    INCLUDED,
    Chain,
    PenaltyModel,
    _fixmat,
    enumerate_chains,
    find_stars,
)

log = logging.getLogger(__name__)

LAMBDA_TOL = 1e-9


@dataclass
class BoundResult:
    penalty: float
    model: PenaltyModel
    upper_bound: float
    base_penalty: float = 0.0
    method: str = "lp"
    fallback: bool = False
    chains: list[Chain] = field(default_factory=list)


def fixation_base_penalty(graph: WeightedGraph, fixations) -> float:
    """Total weight forfeited by included-negative and excluded-positive edges."""
    if fixations is None:
        return 0.0
    fix = _fixmat(graph.n, fixations)
    w = graph.w
    iu = np.triu_indices(graph.n, k=1)
    f, x = fix[iu], w[iu]
    lost = ((f == INCLUDED) & (x < 0)) | ((f == EXCLUDED) & (x > 0))
    return float(np.abs(x[lost]).sum())


def _chain_valid(chain: Chain, w: np.ndarray, fix: np.ndarray) -> bool:
    """A chain survives unless it crosses an included-negative or excluded-positive edge."""
    for i, j, s in chain.signed_edges():
        if s * w[i, j] <= 0:
            return False
        f = fix[i, j]
        if (f == INCLUDED and s < 0) or (f == EXCLUDED and s > 0):
            return False
    return True


def calc_penalty_lp(
    graph: WeightedGraph,
    fixations=None,
    use_stars: bool = False,
    extra_chains=(),
    star_cap: int | None = None,
    rng=None,
) -> BoundResult:
    """Penalty from the LP over all 3/4-node chains (plus extras and stars).

    ``extra_chains`` are carried over from earlier bounds (longer chains
    found greedily); those still valid become additional columns. If the
    LP solver fails, the greedy heuristic bound is returned instead with
    ``fallback=True``.
    """
    fix = _fixmat(graph.n, fixations)
    w = graph.w
    subs: list = enumerate_chains(graph, fix, 4)
    seen = {c.nodes for c in subs}
    for c in extra_chains:
        if c.nodes not in seen and _chain_valid(c, w, fix):
            seen.add(c.nodes)
            subs.append(c)
    if use_stars:
        subs.extend(find_stars(graph, cap=star_cap))
    p0 = fixation_base_penalty(graph, fix)
    base = trivial_upper_bound(graph) - p0
    problem = build_penalty_lp(graph, subs, fix)
    sol = solve_lp(problem)
    if not sol.optimal:
        log.warning("penalty LP %s; falling back to heuristic", sol.status.value)
        res = calc_penalty_heuristic(graph, fix, extra_chains, rng=rng)
        res.fallback = True
        return res
    model = PenaltyModel()
    for sub, lam in zip(problem.columns, sol.x):
        if lam > LAMBDA_TOL:
            model.add(sub, float(lam))
    penalty = max(sol.value, 0.0)
    return BoundResult(
        penalty, model, base - penalty, p0, "lp", False, model.chains()
    )


def calc_penalty_heuristic(
    graph: WeightedGraph, fixations=None, previous_chains=(), rng=None
) -> BoundResult:
    """Greedy penalty: reuse still-valid chains, then peel chains off residuals.

    Phase 1 keeps every previous chain that crosses no included-negative or
    excluded-positive edge, charging its penalty against the free edges'
    residuals. Phase 2 grows the allowed path length from 2 hops upward;
    in each round the negative residual edges are visited in shuffled
    order and drained by shortest positive paths. It stops once no
    negative edge lies inside a positive component.
    """
    n = graph.n
    fix = _fixmat(n, fixations)
    w = graph.w
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    r = np.array(w, dtype=np.float64)
    model = PenaltyModel()
    total = 0.0

    for chain in previous_chains:
        if not _chain_valid(chain, w, fix):
            continue
        p = chain.penalty
        free = [(i, j, s) for i, j, s in chain.signed_edges() if fix[i, j] == FREE]
        if not free or any(s * r[i, j] < p - EPS for i, j, s in free):
            continue
        for i, j, s in chain.signed_edges():
            if fix[i, j] == FREE:
                r[i, j] -= s * p
                r[j, i] = r[i, j]
        model.add(chain, 1.0)
        total += p

    iu, ju = np.triu_indices(n, k=1)
    for length in range(2, n):
        if not _kernels.has_negative_in_positive_component(r, fix, EPS):
            break
        neg = (r[iu, ju] < -EPS) & (fix[iu, ju] != INCLUDED)
        order = np.stack([iu[neg], ju[neg]], axis=1).astype(np.int64)
        order = np.ascontiguousarray(order[rng.permutation(order.shape[0])])
        added, found = _kernels.drain_negative_edges(r, fix, order, length, EPS)
        total += added
        for path, p in found:
            model.add(Chain(tuple(path), float(p)), 1.0)

    p0 = fixation_base_penalty(graph, fix)
    upper = trivial_upper_bound(graph) - p0 - total
    return BoundResult(
        total, model, upper, p0, "heuristic", False, [c for c, _ in model.terms]
    )
