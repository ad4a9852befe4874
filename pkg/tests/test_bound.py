import numpy as np
import pytest
from conftest import chain_graph, graph_from_upper, int_graphs, k3, unit_star
from hypothesis import given
from hypothesis import strategies as st

from cliquepart import bound as bound_mod
from cliquepart.bound import (
    calc_penalty_heuristic,
    calc_penalty_lp,
    fixation_base_penalty,
)
from cliquepart.graph import trivial_upper_bound
from cliquepart.lp import LpSolution, LpStatus, build_penalty_lp, solve_lp
from cliquepart.oracle import brute_force_optimum
from cliquepart.search import Contradiction, EdgeFixations, propagate_transitivity
from cliquepart.subnetwork import Chain, is_permissible


def random_fixations(g, rng, steps):
    fix = EdgeFixations.empty(g.n)
    for _ in range(steps):
        i, j = sorted(rng.choice(g.n, size=2, replace=False))
        if fix[i, j] != 0:
            continue
        try:
            fix = propagate_transitivity(fix, g, (int(i), int(j)), rng.choice(["include", "exclude"]))
        except Contradiction:
            pass
    return fix


class TestFixationBasePenalty:
    def test_examples(self):
        g = graph_from_upper(3, [5, -2, 3])
        assert fixation_base_penalty(g, None) == 0
        fix = EdgeFixations.empty(3)
        fix.state[0, 1] = fix.state[1, 0] = -1
        assert fixation_base_penalty(g, fix) == 5
        fix = EdgeFixations.empty(3)
        fix.state[0, 2] = fix.state[2, 0] = 1
        fix.state[1, 2] = fix.state[2, 1] = -1
        assert fixation_base_penalty(g, fix) == 5

    def test_compatible_fixations_cost_nothing(self):
        g = graph_from_upper(3, [5, -2, 3])
        fix = EdgeFixations.empty(3)
        fix.state[0, 1] = fix.state[1, 0] = 1
        fix.state[0, 2] = fix.state[2, 0] = -1
        assert fixation_base_penalty(g, fix) == 0


class TestLpPenalty:
    def test_k3(self):
        res = calc_penalty_lp(k3())
        assert res.penalty == pytest.approx(1)
        assert len(res.model.terms) == 1 and res.model.terms[0][1] == pytest.approx(1)
        assert res.upper_bound == pytest.approx(1)
        assert not res.fallback

    def test_all_positive(self):
        res = calc_penalty_lp(graph_from_upper(4, [1] * 6))
        assert res.penalty == 0 and res.model.terms == []

    def test_unit_star(self):
        assert calc_penalty_lp(unit_star(), use_stars=True).penalty == pytest.approx(2)
        assert calc_penalty_lp(unit_star()).penalty <= 1.5 + 1e-9

    def test_carried_chains_are_scaled(self):
        res = calc_penalty_lp(unit_star())
        assert sum(c.penalty for c in res.chains) == pytest.approx(res.penalty)

    def test_extra_chains_become_columns(self):
        g = chain_graph([2, 2, 2, 2], -2)  # 5-node chain: no 3/4-node chain exists
        assert calc_penalty_lp(g).penalty == 0
        res = calc_penalty_lp(g, extra_chains=[Chain((0, 1, 2, 3, 4), 2.0)])
        assert res.penalty == pytest.approx(2)

    def test_solver_failure_falls_back(self, monkeypatch):
        monkeypatch.setattr(bound_mod, "solve_lp", lambda prob: LpSolution(LpStatus.FAILED))
        res = calc_penalty_lp(k3())
        assert res.fallback and res.method == "heuristic"
        assert res.penalty == pytest.approx(1)

    @given(int_graphs(min_n=3, max_n=7))
    def test_model_is_permissible(self, g):
        res = calc_penalty_lp(g, use_stars=True)
        assert is_permissible(res.model, g)
        assert res.model.total_penalty == pytest.approx(res.penalty, abs=1e-7)


class TestHeuristicPenalty:
    def test_k3(self):
        assert calc_penalty_heuristic(k3()).penalty == 1

    def test_long_chain_matches_lp(self):
        g = chain_graph([1, 1, 1], -1)
        res = calc_penalty_heuristic(g, rng=0)
        assert res.penalty == 1
        assert res.penalty == pytest.approx(calc_penalty_lp(g).penalty)
        assert brute_force_optimum(g)[1] == trivial_upper_bound(g) - 1

    def test_previous_chain_with_excluded_edge_dropped(self):
        g = chain_graph([1, 1], -1)
        fix = EdgeFixations.empty(3)
        fix.state[0, 1] = fix.state[1, 0] = -1
        res = calc_penalty_heuristic(g, fix, [Chain((0, 1, 2), 1.0)])
        assert res.penalty == 0
        assert res.base_penalty == 1
        assert res.upper_bound == 1 == brute_force_optimum(g, fix)[1]

    def test_previous_chains_reused(self):
        g = chain_graph([2, 2, 2, 2], -2)
        res = calc_penalty_heuristic(g, None, [Chain((0, 1, 2, 3, 4), 2.0)])
        assert res.penalty == 2
        assert res.model.terms[0][0].nodes == (0, 1, 2, 3, 4)

    def test_previous_chain_over_capacity_skipped(self):
        g = chain_graph([2, 2, 2, 2], -2)
        res = calc_penalty_heuristic(g, None, [Chain((0, 1, 2, 3, 4), 3.0)], rng=0)
        assert res.penalty == 2  # found afresh in phase 2 instead

    @given(int_graphs(min_n=3, max_n=8), st.integers(0, 1000))
    def test_deterministic_per_seed(self, g, seed):
        a = calc_penalty_heuristic(g, rng=seed)
        b = calc_penalty_heuristic(g, rng=seed)
        assert a.penalty == b.penalty
        assert [c.nodes for c, _ in a.model.terms] == [c.nodes for c, _ in b.model.terms]

    @given(int_graphs(min_n=3, max_n=8), st.integers(0, 1000))
    def test_lp_over_own_chains_dominates(self, g, seed):
        res = calc_penalty_heuristic(g, rng=seed)
        assert is_permissible(res.model, g)
        chains = [c for c, _ in res.model.terms]
        lp = solve_lp(build_penalty_lp(g, chains)).value
        assert lp >= res.penalty - 1e-9
        assert calc_penalty_lp(g, extra_chains=chains).penalty >= res.penalty - 1e-9


@pytest.mark.parametrize("seed", range(40))
def test_bounds_sound_under_fixations(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 9))
    g = graph_from_upper(n, rng.integers(-6, 7, size=n * (n - 1) // 2))
    carried = calc_penalty_lp(g).chains
    for _ in range(4):
        fix = random_fixations(g, rng, int(rng.integers(1, 2 * n)))
        assert fix.is_consistent()
        opt = brute_force_optimum(g, fix)[1]
        lp = calc_penalty_lp(g, fix, extra_chains=carried)
        heur = calc_penalty_heuristic(g, fix, carried, rng=rng)
        assert lp.upper_bound >= opt - 1e-6
        assert heur.upper_bound >= opt - 1e-6
        assert is_permissible(lp.model, g, fix)
        assert is_permissible(heur.model, g, fix)
