"""Command-line entry point: ``cliquepart <command> ...``.

Exit codes: 0 success, 1 usage error, 2 I/O or parse error, 3 every
instance hit the time limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import _kernels
from .bench import HEADER, ConfigError, InstanceResult, _row, load_config, run_benchmark
from .bound import calc_penalty_heuristic, calc_penalty_lp
from .generators import gen_set1, gen_set2, gen_set3
from .graph import GraphFormatError, load_graph, save_graph, trivial_upper_bound
from .heuristic import initial_solution
from .lp import (
    RELAXED_ILP_CAP,
    LpSizeError,
    build_penalty_lp,
    format_lp,
    relaxed_upper_bound,
)
from .oracle import ORACLE_CAP, OracleSizeError, brute_force_optimum
from .search import SearchConfig, branch_and_bound
from .subnetwork import enumerate_chains, find_stars

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_TIMEOUT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_graph(path: str):
    if path == "-":
        return load_graph(sys.stdin)
    with open(path) as fh:
        return load_graph(fh)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _clusters(partition) -> str:
    return " ".join("{" + ",".join(str(v + 1) for v in c) + "}" for c in partition.clusters())


def _num(x: float) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else f"{x:.6f}"


def cmd_solve(args) -> int:
    g = _read_graph(args.file)
    cfg = SearchConfig(
        seed=args.seed, lp_period=args.lp_period, use_stars=args.stars,
        time_limit_s=args.time_limit_s,
    )
    rep = branch_and_bound(g, cfg)
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(HEADER)
        res = InstanceResult(
            Path(args.file).stem, g.n, 0, args.seed, rep.q_trivial, rep.q_min, rep.q_max,
            rep.q_opt, rep.nodes, rep.lp_solves, rep.elapsed * 1e3, rep.status,
        )
        w.writerow(_row(res, timing=True))
        text = buf.getvalue()
    else:
        text = rep.summary() + "\n"
    _emit(text, args.out)
    return EXIT_TIMEOUT if rep.status == "timeout" else EXIT_OK


def cmd_bound(args) -> int:
    g = _read_graph(args.file)
    lines = [f"backend     {_kernels.BACKEND}", f"Q_trivial   {_num(trivial_upper_bound(g))}"]
    heur = calc_penalty_heuristic(g, None, (), rng=args.seed)
    lines.append(f"heuristic   P={_num(heur.penalty)} bound={_num(heur.upper_bound)}")
    res = calc_penalty_lp(g, None, use_stars=args.stars)
    tag = "lp+stars" if args.stars else "lp"
    lines.append(
        f"{tag:<11} P={_num(res.penalty)} bound={_num(res.upper_bound)}"
        f" columns={len(res.model.terms)} active"
        + (" (fell back to heuristic)" if res.fallback else "")
    )
    if args.relaxed:
        if g.n > RELAXED_ILP_CAP:
            raise UsageError(f"--relaxed supports n <= {RELAXED_ILP_CAP}")
        lines.append(f"relaxed     bound={_num(relaxed_upper_bound(g))}")
    text = "\n".join(lines) + "\n"
    if args.dump_lp:
        subs = enumerate_chains(g, None, 4)
        if args.stars:
            subs = subs + find_stars(g)
        text += "\n" + format_lp(build_penalty_lp(g, subs))
    _emit(text, args.out)
    return EXIT_OK


def cmd_heur(args) -> int:
    g = _read_graph(args.file)
    part = initial_solution(g, seed=args.seed)
    _emit(f"Q_min       {_num(part.score)}\npartition   {_clusters(part)}\n", args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = _read_graph(args.file)
    if g.n > ORACLE_CAP:
        raise UsageError(f"oracle supports n <= {ORACLE_CAP}")
    part, score = brute_force_optimum(g)
    _emit(f"Q_opt       {_num(score)}\npartition   {_clusters(part)}\n", args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.set in ("set1", "set3") and args.q is None:
        raise UsageError(f"{args.set} needs --q")
    if args.set == "set2" and args.p is None:
        raise UsageError("set2 needs --p")
    try:
        if args.set == "set1":
            g = gen_set1(args.n, args.q, args.seed)
        elif args.set == "set2":
            g = gen_set2(args.n, args.p, args.seed)
        else:
            g = gen_set3(args.n, args.q, args.zero_prob, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(save_graph(g), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        raise UsageError(f"{args.config}: {exc}") from None
    if args.out:
        cfg.out = args.out
    if args.seed is not None:
        cfg.seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers
    if args.no_timing:
        cfg.timing = False
    text, results = run_benchmark(cfg)
    if not cfg.out:
        sys.stdout.write(text)
    if results and all(r.status == "timeout" for r in results):
        return EXIT_TIMEOUT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cliquepart", description="Exact clique partitioning and upper bounds.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def graph_cmd(name, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("file", help="graph file ('-' for stdin)")
        s.add_argument("--out", help="write output here instead of stdout")
        return s

    s = graph_cmd("solve", "solve exactly by branch and bound")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--lp-period", type=int, default=4)
    s.add_argument("--stars", action="store_true", help="add star columns to the root LP")
    s.add_argument("--time-limit-s", type=float, default=None)
    s.add_argument("--csv", action="store_true", help="print a report row instead of a summary")
    s.set_defaults(func=cmd_solve)

    s = graph_cmd("bound", "root upper bounds")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--stars", action="store_true")
    s.add_argument("--relaxed", action="store_true", help="also solve the relaxed triangle LP")
    s.add_argument("--dump-lp", action="store_true", help="append the penalty LP in text form")
    s.set_defaults(func=cmd_bound)

    s = graph_cmd("heur", "heuristic partition only")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_heur)

    s = graph_cmd("oracle", f"brute-force optimum (n <= {ORACLE_CAP})")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("gen", help="generate a random instance")
    s.add_argument("set", choices=["set1", "set2", "set3"])
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--q", type=int, help="weight range for set1/set3")
    s.add_argument("--p", type=int, help="vector length for set2")
    s.add_argument("--zero-prob", type=float, default=0.4)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("bench", help="run a benchmark grid from a key=value config")
    s.add_argument("config")
    s.add_argument("--out")
    s.add_argument("--seed", type=int, default=None, help="override the config's master seed")
    s.add_argument("--workers", type=int, default=None)
    s.add_argument("--no-timing", action="store_true", help="write NA in t_ms")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "lp_period", 1) < 1:
        parser.error("--lp-period must be >= 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"cliquepart: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, GraphFormatError) as exc:
        print(f"cliquepart: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OracleSizeError, LpSizeError) as exc:
        print(f"cliquepart: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
