"""Random instance families used in the benchmark tables.

All draws come from numpy's PCG64 bit generator; bounded integers use
numpy's unbiased (rejection-based) sampler, so a seed reproduces the same
graph on every platform.
"""

from __future__ import annotations

import numpy as np

from .graph import WeightedGraph


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _from_upper(n: int, values: np.ndarray) -> WeightedGraph:
    w = np.zeros((n, n))
    w[np.triu_indices(n, k=1)] = values
    return WeightedGraph(w + w.T, integral=True)


def gen_set1(n: int, q: int, seed: int) -> WeightedGraph:
    """Weights drawn uniformly from the integers ``-q..q``."""
    if n < 2 or q < 1:
        raise ValueError("need n >= 2 and q >= 1")
    rng = _rng(seed)
    return _from_upper(n, rng.integers(-q, q + 1, size=n * (n - 1) // 2))


def gen_set2(n: int, p: int, seed: int) -> WeightedGraph:
    """Random binary vectors of length ``p``; weight = p - 2 * Hamming distance."""
    if n < 2 or p < 1:
        raise ValueError("need n >= 2 and p >= 1")
    rng = _rng(seed)
    vecs = rng.integers(0, 2, size=(n, p))
    ham = (vecs[:, None, :] != vecs[None, :, :]).sum(axis=2)
    w = (p - 2 * ham).astype(np.float64)
    np.fill_diagonal(w, 0.0)
    return WeightedGraph(w, integral=True)


def gen_set3(n: int, q: int, zero_prob: float, seed: int) -> WeightedGraph:
    """Set-1 draw, then every edge zeroed independently with ``zero_prob``."""
    if not 0.0 <= zero_prob <= 1.0:
        raise ValueError("zero_prob must lie in [0, 1]")
    if n < 2 or q < 1:
        raise ValueError("need n >= 2 and q >= 1")
    rng = _rng(seed)
    m = n * (n - 1) // 2
    values = rng.integers(-q, q + 1, size=m)
    values[rng.random(m) < zero_prob] = 0
    return _from_upper(n, values)


GENERATORS = {"set1": gen_set1, "set2": gen_set2, "set3": gen_set3}
