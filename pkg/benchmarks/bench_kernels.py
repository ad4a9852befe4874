"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cliquepart._kernels import _pykernels
from cliquepart.generators import gen_set1

try:
    from cliquepart._kernels import _ckernels as compiled
except ImportError:
    compiled = None


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    g = gen_set1(24, 10, seed=1)
    w = np.ascontiguousarray(g.w)
    fix = np.zeros(w.shape, dtype=np.int8)
    iu, ju = np.triu_indices(g.n, k=1)
    neg = w[iu, ju] < 0
    order = np.ascontiguousarray(np.stack([iu[neg], ju[neg]], axis=1).astype(np.int64))
    small = gen_set1(10, 10, seed=2)
    ws = np.ascontiguousarray(small.w)
    fs = np.zeros(ws.shape, dtype=np.int8)
    return {
        "enumerate_chains n=24": lambda k: k.enumerate_chains(w, fix, 4, 1e-9),
        "bfs_path n=24": lambda k: [k.bfs_path(w, fix, a, b, g.n, 1e-9) for a, b in order[:50]],
        "drain_negative_edges n=24": lambda k: k.drain_negative_edges(w.copy(), fix, order, 6, 1e-9),
        "rgs_optimum n=10": lambda k: k.rgs_optimum(ws, fs, 0.0),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if compiled is None:
        print("compiled extension not built; only the Python backend is available")
    print(f"{'kernel':<28}{'python (ms)':>14}{'cython (ms)':>14}{'speedup':>10}")
    for name, fn in cases().items():
        tp = _best(lambda fn=fn: fn(_pykernels), args.repeat) * 1e3
        if compiled is None:
            print(f"{name:<28}{tp:>14.2f}{'-':>14}{'-':>10}")
            continue
        tc = _best(lambda fn=fn: fn(compiled), args.repeat) * 1e3
        print(f"{name:<28}{tp:>14.2f}{tc:>14.2f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
