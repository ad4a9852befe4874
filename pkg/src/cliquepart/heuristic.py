"""Initial feasible partitions: greedy merging plus local search.

Stands in for an external clustering heuristic; all the exact search needs
is a good partition and its score.
"""

from __future__ import annotations

import numpy as np

from .graph import Partition, WeightedGraph, canonical_labels

IMPROVE_TOL = 1e-10


def _onehot(labels: np.ndarray) -> np.ndarray:
    k = int(labels.max()) + 1
    z = np.zeros((labels.size, k))
    z[np.arange(labels.size), labels] = 1.0
    return z


def greedy_merge(graph: WeightedGraph) -> np.ndarray:
    """Agglomerate from singletons, always merging the heaviest positive pair."""
    n = graph.n
    labels = np.arange(n)
    m = graph.w.copy()  # inter-cluster weight sums, indexed by cluster id
    alive = np.ones(n, dtype=bool)
    while True:
        sub = np.where(np.outer(alive, alive), np.triu(m, k=1), -np.inf)
        flat = int(np.argmax(sub))  # first maximum = lowest (i, j) pair
        i, j = divmod(flat, n)
        if not sub[i, j] > IMPROVE_TOL:
            break
        labels[labels == j] = i
        m[i, :] += m[j, :]
        m[:, i] += m[:, j]
        m[i, i] = 0.0
        alive[j] = False
    return np.asarray(canonical_labels(labels))


def local_search(graph: WeightedGraph, partition) -> Partition:
    """Best-improvement relocation and cluster-merge moves to a local optimum."""
    w = graph.w
    labels = np.asarray(
        partition.assignment if isinstance(partition, Partition) else partition
    )
    labels = np.asarray(canonical_labels(labels))
    n = graph.n
    while True:
        z = _onehot(labels)
        k = z.shape[1]
        s = w @ z  # s[v, c]: weight from v into cluster c
        own = s[np.arange(n), labels]
        sizes = z.sum(axis=0)
        reloc = s - own[:, None]
        reloc[np.arange(n), labels] = -np.inf
        # moving to a fresh cluster only makes sense from a non-singleton
        fresh = np.where(sizes[labels] > 1, -own, -np.inf)
        gains = np.hstack([reloc, fresh[:, None]])
        merge = np.triu(z.T @ s, k=1)
        merge[np.tril_indices(k)] = -np.inf

        best_move = np.unravel_index(int(np.argmax(gains)), gains.shape)
        best_gain = gains[best_move]
        best_merge = np.unravel_index(int(np.argmax(merge)), merge.shape)
        merge_gain = merge[best_merge] if k > 1 else -np.inf

        if max(best_gain, merge_gain) <= IMPROVE_TOL:
            break
        if best_gain >= merge_gain:
            v, c = best_move
            labels = labels.copy()
            labels[v] = c  # c == k opens a new cluster
        else:
            a, b = best_merge
            labels = np.where(labels == b, a, labels)
        labels = np.asarray(canonical_labels(labels))
    return Partition.of(graph, labels)


def _kick(graph: WeightedGraph, part: Partition, rng: np.random.Generator) -> Partition:
    """Reassign a quarter of the nodes at random, then descend again."""
    n = graph.n
    labels = np.array(part.assignment)
    k = int(labels.max()) + 1
    moved = rng.choice(n, size=max(1, n // 4), replace=False)
    labels[moved] = rng.integers(0, k + 1, size=moved.size)
    return local_search(graph, labels)


def initial_solution(
    graph: WeightedGraph, seed: int = 0, restarts: int = 5, kicks: int = 4
) -> Partition:
    """Best of ``restarts`` local-search runs, each refined by random kicks.

    The first run starts from the greedy merge, later ones from random
    labelings with about ``n / 3`` clusters. A kick is kept when it does
    not lose score.
    """
    n = graph.n
    rng = np.random.default_rng(seed)
    best = None
    for r in range(restarts):
        if r == 0:
            cur = local_search(graph, greedy_merge(graph))
        else:
            cur = local_search(graph, rng.integers(0, max(2, n // 3), size=n))
        for _ in range(kicks):
            cand = _kick(graph, cur, rng)
            if cand.score >= cur.score:
                cur = cand
        if best is None or cur.score > best.score:
            best = cur
    return best
