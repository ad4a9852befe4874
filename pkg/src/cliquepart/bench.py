"""Batch benchmark runner and CSV report.

A run is described by a flat ``key=value`` file::

    # set-1 grid, five graphs per (n, q)
    seed = 2024
    set = set1
    n = 10..11
    params = 1,2,3,5,10,50,100

Recognized keys are listed in ``RunConfig``. Every instance gets its own
seed, derived from the master seed and its grid position, and the seed
is written into its row so any single graph can be regenerated with
``cliquepart gen``.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .generators import GENERATORS
from .search import SearchConfig, branch_and_bound

HEADER = [
    "set", "n", "param", "seed", "Q_trivial", "Q_min", "Q_max", "Q_opt",
    "nodes", "lp_solves", "t_ms", "status",
]
DEFAULT_PARAMS = (1, 2, 3, 5, 10, 50, 100)
SET_INDEX = {"set1": 1, "set2": 2, "set3": 3}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    seed: int
    sets: tuple[str, ...] = ("set1",)
    ns: tuple[int, ...] = (10,)
    params: tuple[int, ...] = DEFAULT_PARAMS
    zero_prob: float = 0.4
    instances: int = 5
    lp_period: int = 4
    stars: bool = False
    time_limit_s: float | None = None
    out: str | None = None
    timing: bool = True
    workers: int = 1
    mode: str = "bench"

    def __post_init__(self):
        for s in self.sets:
            if s not in GENERATORS:
                raise ConfigError(f"unknown set {s!r}")
        if not self.ns or min(self.ns) < 2:
            raise ConfigError("every n must be >= 2")
        if not self.params or min(self.params) < 1:
            raise ConfigError("params (q or p) must be >= 1")
        if not 0.0 <= self.zero_prob <= 1.0:
            raise ConfigError("zero_prob must lie in [0, 1]")
        if self.instances < 1:
            raise ConfigError("instances must be >= 1")
        if self.lp_period < 1:
            raise ConfigError("lp_period must be >= 1")
        if self.time_limit_s is not None and self.time_limit_s <= 0:
            raise ConfigError("time_limit_s must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


def _int_list(text: str) -> tuple[int, ...]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return tuple(out)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_PARSERS = {
    "seed": ("seed", int),
    "set": ("sets", lambda s: tuple(x.strip() for x in s.split(",") if x.strip())),
    "n": ("ns", _int_list),
    "params": ("params", _int_list),
    "zero_prob": ("zero_prob", float),
    "instances": ("instances", int),
    "lp_period": ("lp_period", int),
    "stars": ("stars", _bool),
    "time_limit_s": ("time_limit_s", float),
    "out": ("out", str),
    "timing": ("timing", _bool),
    "workers": ("workers", int),
}


def parse_config(text: str) -> RunConfig:
    """Parse a ``key=value`` run description; blank lines and ``#`` comments are ignored."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        name, conv = _PARSERS[key]
        try:
            values[name] = conv(val)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    if not values:
        raise ConfigError("empty configuration")
    if "seed" not in values:
        raise ConfigError("'seed' is required")
    return RunConfig(**values)


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def instance_seed(master: int, set_name: str, n: int, param_index: int, k: int) -> int:
    ss = np.random.SeedSequence([master, SET_INDEX[set_name], n, param_index, k])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def make_instance(set_name: str, n: int, param: int, seed: int, zero_prob: float):
    if set_name == "set3":
        return GENERATORS["set3"](n, param, zero_prob, seed)
    return GENERATORS[set_name](n, param, seed)


@dataclass(order=True)
class InstanceResult:
    set: str
    n: int
    param: int
    seed: int
    q_trivial: float = field(compare=False)
    q_min: float = field(compare=False)
    q_max: float = field(compare=False)
    q_opt: float = field(compare=False)
    nodes: int = field(compare=False)
    lp_solves: int = field(compare=False)
    t_ms: float = field(compare=False)
    status: str = field(compare=False)


def _run_one(task) -> InstanceResult:
    set_name, n, param, seed, cfg = task
    g = make_instance(set_name, n, param, seed, cfg.zero_prob)
    sc = SearchConfig(
        seed=seed, lp_period=cfg.lp_period, use_stars=cfg.stars, time_limit_s=cfg.time_limit_s
    )
    t0 = time.perf_counter()
    rep = branch_and_bound(g, sc)
    t_ms = (time.perf_counter() - t0) * 1e3
    return InstanceResult(
        set_name, n, param, seed, rep.q_trivial, rep.q_min, rep.q_max, rep.q_opt,
        rep.nodes, rep.lp_solves, t_ms, rep.status,
    )


def plan(cfg: RunConfig) -> list[tuple]:
    tasks = []
    for set_name in cfg.sets:
        for n in cfg.ns:
            for pi, param in enumerate(cfg.params):
                for k in range(cfg.instances):
                    seed = instance_seed(cfg.seed, set_name, n, pi, k)
                    tasks.append((set_name, n, param, seed, cfg))
    return tasks


def run_instances(cfg: RunConfig) -> list[InstanceResult]:
    tasks = plan(cfg)
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            results = list(ex.map(_run_one, tasks))
    else:
        results = [_run_one(t) for t in tasks]
    return sorted(results)


def _fmt(x: float) -> str:
    x = float(x)
    if x.is_integer():
        return str(int(x))
    return f"{x:.6f}"


def _ratio(x: float, q_opt: float) -> str:
    return f"{x / q_opt:.6f}"


def _row(r: InstanceResult, timing: bool) -> list[str]:
    t = f"{r.t_ms:.1f}" if timing else "NA"
    head = [r.set, str(r.n), str(r.param), str(r.seed)]
    tail = [str(r.nodes), str(r.lp_solves), t]
    if r.status == "optimal" and r.q_opt > 0:
        vals = [_ratio(r.q_trivial, r.q_opt), _ratio(r.q_min, r.q_opt),
                _ratio(r.q_max, r.q_opt), _fmt(r.q_opt)]
        return head + vals + tail + ["ok"]
    vals = [_fmt(r.q_trivial), _fmt(r.q_min), _fmt(r.q_max), _fmt(r.q_opt)]
    status = "timeout" if r.status == "timeout" else "abs"
    return head + vals + tail + [status]


def _agg_row(set_name: str, n: int, group: list[InstanceResult], timing: bool) -> list[str]:
    """Mean per-instance ratios (and mean Q_opt) over rows with a defined ratio."""
    ok = [r for r in group if r.status == "optimal" and r.q_opt > 0]
    solved = [r for r in group if r.status == "optimal"]
    if ok:
        ratios = [
            f"{np.mean([getattr(r, a) / r.q_opt for r in ok]):.6f}"
            for a in ("q_trivial", "q_min", "q_max")
        ]
        ratios.append(f"{np.mean([r.q_opt for r in ok]):.6f}")
    else:
        ratios = ["NA"] * 4
    if solved:
        nodes = f"{np.mean([r.nodes for r in solved]):.1f}"
        lps = f"{np.mean([r.lp_solves for r in solved]):.1f}"
        t = f"{sum(r.t_ms for r in solved):.1f}" if timing else "NA"
    else:
        nodes = lps = t = "NA"
    return [set_name, str(n), "AGG", "NA"] + ratios + [nodes, lps, t, "AGG"]


def format_report(results: list[InstanceResult], timing: bool = True) -> str:
    """Instance rows ordered by (set, n, param, seed), one ``AGG`` row closing each (set, n)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    results = sorted(results)
    i = 0
    while i < len(results):
        key = (results[i].set, results[i].n)
        j = i
        while j < len(results) and (results[j].set, results[j].n) == key:
            j += 1
        group = results[i:j]
        for r in group:
            w.writerow(_row(r, timing))
        w.writerow(_agg_row(key[0], key[1], group, timing))
        i = j
    return buf.getvalue()


def run_benchmark(cfg: RunConfig) -> tuple[str, list[InstanceResult]]:
    """Run every instance in the grid; return the CSV text and raw results.

    The report is also written to ``cfg.out`` when set.
    """
    results = run_instances(cfg)
    text = format_report(results, cfg.timing)
    if cfg.out:
        Path(cfg.out).write_text(text)
    return text, results
