"""Exact clique partitioning with penalizing-subnetwork upper bounds."""

from ._kernels import BACKEND
from .bound import BoundResult, calc_penalty_heuristic, calc_penalty_lp
from .generators import gen_set1, gen_set2, gen_set3
from .graph import (
    DirectedNetwork,
    Partition,
    WeightedGraph,
    load_graph,
    modularity_to_cpp,
    quality,
    save_graph,
    trivial_upper_bound,
)
from .heuristic import initial_solution
from .lp import relaxed_upper_bound, solve_lp
from .oracle import brute_force_optimum
from .search import EdgeFixations, SearchConfig, SolveReport, branch_and_bound
from .subnetwork import Chain, Star, enumerate_chains, find_stars

__all__ = [
    "BACKEND", "BoundResult", "Chain", "DirectedNetwork", "EdgeFixations", "Partition",
    "SearchConfig", "SolveReport", "Star", "WeightedGraph", "branch_and_bound",
    "brute_force_optimum", "calc_penalty_heuristic", "calc_penalty_lp", "enumerate_chains",
    "find_stars", "gen_set1", "gen_set2", "gen_set3", "initial_solution", "load_graph",
    "modularity_to_cpp", "quality", "relaxed_upper_bound", "save_graph", "solve_lp",
    "trivial_upper_bound",
]
