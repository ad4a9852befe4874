"""Complete weighted graphs, partition scoring and the graph text format."""

from __future__ import annotations

import io
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import TextIO

import numpy as np


class DimensionError(ValueError):
    """Partition length does not match the graph."""


class DegenerateNetworkError(ValueError):
    """Network with zero total weight; modularity is undefined."""


class GraphFormatError(ValueError):
    """Malformed graph file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Complete undirected graph given by a symmetric weight matrix.

    The diagonal of ``w`` is always zero; self-loop weights are folded into
    ``loop_offset`` because they contribute the same amount to every
    partition.
    """

    w: np.ndarray
    loop_offset: float = 0.0
    integral: bool = False

    def __post_init__(self):
        w = np.array(self.w, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 1:
            raise ValueError("weight matrix must be square with n >= 1")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if not np.array_equal(w, w.T):
            raise ValueError("weight matrix must be symmetric")
        np.fill_diagonal(w, 0.0)
        w.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "loop_offset", float(self.loop_offset))

    @property
    def n(self) -> int:
        return self.w.shape[0]

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int, float]],
        loop_offset: float = 0.0,
        integral: bool | None = None,
    ) -> WeightedGraph:
        """Build from 0-based ``(i, j, w)`` triples; missing pairs are 0."""
        w = np.zeros((n, n))
        offset = loop_offset
        for i, j, x in edges:
            if i == j:
                offset += x
            else:
                w[i, j] = w[j, i] = x
        if integral is None:
            integral = bool(np.all(w == np.round(w))) and float(offset).is_integer()
        return cls(w, offset, integral)

    def pairs(self):
        """Upper-triangle index arrays ``(i, j)`` with ``i < j``."""
        return np.triu_indices(self.n, k=1)

    def edge_weights(self) -> np.ndarray:
        return self.w[self.pairs()]

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            np.array_equal(self.w, other.w)
            and self.loop_offset == other.loop_offset
            and self.integral == other.integral
        )

    __hash__ = None


@dataclass(frozen=True)
class Partition:
    """Cluster labels per node together with the partition's quality."""

    assignment: tuple[int, ...]
    score: float

    @classmethod
    def of(cls, graph: WeightedGraph, labels: Sequence) -> Partition:
        labels = canonical_labels(labels)
        return cls(labels, quality(graph, labels))

    def clusters(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for v, c in enumerate(self.assignment):
            out.setdefault(c, []).append(v)
        return list(out.values())


def canonical_labels(labels: Sequence) -> tuple[int, ...]:
    """Relabel clusters in order of first appearance (restricted growth)."""
    seen: dict = {}
    return tuple(seen.setdefault(c, len(seen)) for c in labels)


@dataclass(frozen=True, eq=False)
class DirectedNetwork:
    """Possibly directed weighted network; ``arcs[i, j]`` is the i->j weight."""

    arcs: np.ndarray

    def __post_init__(self):
        a = np.array(self.arcs, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("arc matrix must be square")
        object.__setattr__(self, "arcs", a)

    @property
    def n(self) -> int:
        return self.arcs.shape[0]

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int, float]]) -> DirectedNetwork:
        a = np.zeros((n, n))
        for i, j, x in arcs:
            a[i, j] += x
        return cls(a)


def _labels_of(partition) -> np.ndarray:
    if isinstance(partition, Partition):
        return np.asarray(partition.assignment)
    return np.asarray(partition)


def quality(graph: WeightedGraph, partition) -> float:
    """Sum of intra-cluster weights plus the folded self-loop constant."""
    labels = _labels_of(partition)
    if labels.shape != (graph.n,):
        raise DimensionError(
            f"partition has {labels.size} labels, graph has {graph.n} nodes"
        )
    i, j = graph.pairs()
    same = labels[i] == labels[j]
    return graph.loop_offset + float(graph.w[i[same], j[same]].sum())


def trivial_upper_bound(graph: WeightedGraph) -> float:
    """Sum of positive edge weights plus all self-loops.

    Negative loops are counted as the bound prescribes; positive loops are
    counted as well since they live in ``loop_offset`` and every score
    includes them.
    """
    x = graph.edge_weights()
    return float(x[x > 0].sum()) + graph.loop_offset


def modularity_to_cpp(net: DirectedNetwork) -> WeightedGraph:
    """Complete graph whose partition quality equals the network's modularity."""
    a = net.arcs
    total = float(a.sum())
    if total == 0.0:
        raise DegenerateNetworkError("total network weight is zero")
    s_in = a.sum(axis=1)
    s_out = a.sum(axis=0)
    # pairwise modularity score for ordered pairs, then symmetrise
    b = a / total - np.outer(s_in, s_out) / total**2
    w = b + b.T
    offset = float(np.trace(b))
    np.fill_diagonal(w, 0.0)
    return WeightedGraph(w, offset, integral=False)


# --- text format -----------------------------------------------------------


def _parse_number(tok: str, lineno: int) -> tuple[float, bool]:
    try:
        return float(int(tok)), True
    except ValueError:
        pass
    try:
        x = float(tok)
    except ValueError:
        raise GraphFormatError(f"bad weight {tok!r}", lineno) from None
    if not math.isfinite(x):
        raise GraphFormatError(f"non-finite weight {tok!r}", lineno)
    return x, False


def load_graph(stream: TextIO | str) -> WeightedGraph:
    """Parse the edge-list text format (1-based node indices)."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    n = None
    seen: dict[tuple[int, int], float] = {}
    offset = 0.0
    integral = True
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if n is None:
            if len(toks) != 1:
                raise GraphFormatError("header must be a single node count", lineno)
            try:
                n = int(toks[0])
            except ValueError:
                raise GraphFormatError(f"bad node count {toks[0]!r}", lineno) from None
            if n < 1:
                raise GraphFormatError("node count must be >= 1", lineno)
            continue
        if len(toks) != 3:
            raise GraphFormatError("expected 'i j w'", lineno)
        try:
            i, j = int(toks[0]), int(toks[1])
        except ValueError:
            raise GraphFormatError("node indices must be integers", lineno) from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphFormatError(f"node index out of range 1..{n}", lineno)
        x, is_int = _parse_number(toks[2], lineno)
        integral = integral and is_int
        if i == j:
            offset += x
            continue
        key = (min(i, j) - 1, max(i, j) - 1)
        if key in seen and seen[key] != x:
            raise GraphFormatError(
                f"conflicting duplicate weight for pair ({i}, {j})", lineno
            )
        seen[key] = x
    if n is None:
        raise GraphFormatError("missing header")
    return WeightedGraph.from_edges(
        n, ((i, j, x) for (i, j), x in seen.items()), offset, integral
    )


def _fmt(x: float, integral: bool) -> str:
    if integral and float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def save_graph(graph: WeightedGraph, stream: TextIO | None = None) -> str:
    """Write the canonical text form; returns it as a string as well."""
    lines = [str(graph.n)]
    if graph.loop_offset != 0.0:
        lines.append(f"1 1 {_fmt(graph.loop_offset, graph.integral)}")
    for i, j in zip(*graph.pairs()):
        x = graph.w[i, j]
        if x != 0.0:
            lines.append(f"{i + 1} {j + 1} {_fmt(x, graph.integral)}")
    text = "\n".join(lines) + "\n"
    if stream is not None:
        stream.write(text)
    return text
