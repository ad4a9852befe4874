"""Brute-force optimum over all set partitions (test and CLI oracle).

Deliberately free of any bounding logic so that it cannot share a bug with
the branch-and-bound code it is used to check.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .graph import Partition, WeightedGraph

ORACLE_CAP = 13


class OracleSizeError(ValueError):
    pass


def _run(graph: WeightedGraph, fixations, cap: int):
    if graph.n > cap:
        raise OracleSizeError(f"brute force limited to n <= {cap} (got {graph.n})")
    if fixations is None:
        fix = np.zeros((graph.n, graph.n), dtype=np.int8)
    else:
        fix = np.ascontiguousarray(getattr(fixations, "state", fixations), dtype=np.int8)
    w = np.ascontiguousarray(graph.w)
    return _kernels.rgs_optimum(w, fix, graph.loop_offset)


def brute_force_optimum(
    graph: WeightedGraph, fixations=None, cap: int = ORACLE_CAP
) -> tuple[Partition | None, float]:
    """Exact maximum of the partition quality by exhaustive enumeration.

    With ``fixations`` only partitions honouring every included/excluded
    pair are considered; ``(None, -inf)`` is returned if none exists.
    Among maximisers the lexicographically smallest restricted-growth
    string wins.
    """
    labels, score, _ = _run(graph, fixations, cap)
    if labels is None:
        return None, float("-inf")
    return Partition(tuple(int(c) for c in labels), float(score)), float(score)


def count_partitions(n: int, fixations=None) -> int:
    """Number of set partitions of ``n`` nodes visited by the enumeration."""
    g = WeightedGraph(np.zeros((n, n)))
    return int(_run(g, fixations, ORACLE_CAP)[2])
