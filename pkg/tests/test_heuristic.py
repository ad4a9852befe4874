import numpy as np
from conftest import graph_from_upper, int_graphs, k3
from hypothesis import given
from hypothesis import strategies as st

from cliquepart.generators import gen_set1
from cliquepart.graph import quality
from cliquepart.heuristic import greedy_merge, initial_solution, local_search
from cliquepart.oracle import brute_force_optimum


class TestInitialSolution:
    def test_all_positive(self):
        g = graph_from_upper(5, np.arange(1, 11))
        p = initial_solution(g)
        assert p.assignment == (0,) * 5 and p.score == 55

    def test_all_negative(self):
        p = initial_solution(graph_from_upper(4, [-1] * 6))
        assert p.assignment == (0, 1, 2, 3) and p.score == 0

    def test_k3(self):
        assert initial_solution(k3()).score == 1

    @given(int_graphs(min_n=1, max_n=9), st.integers(0, 100))
    def test_score_is_quality_and_deterministic(self, g, seed):
        a = initial_solution(g, seed=seed)
        assert a.score == quality(g, a.assignment)
        assert a == initial_solution(g, seed=seed)
        assert a.score <= brute_force_optimum(g)[1]


class TestLocalSearch:
    def test_optimum_is_fixed_point(self):
        g = gen_set1(8, 5, seed=1)
        opt, _ = brute_force_optimum(g)
        assert local_search(g, opt).score == opt.score

    def test_singletons_merge_on_positive_graph(self):
        g = graph_from_upper(5, np.ones(10))
        assert local_search(g, list(range(5))).assignment == (0,) * 5

    def test_within_five_percent_on_most_instances(self):
        hits = total = 0
        for k in range(100):
            g = gen_set1(10, (1, 2, 3, 5, 10, 50, 100)[k % 7], seed=5000 + k)
            opt = brute_force_optimum(g)[1]
            if opt <= 0:
                continue
            total += 1
            hits += initial_solution(g, seed=k).score >= 0.95 * opt
        assert hits >= 0.9 * total

    @given(int_graphs(min_n=1, max_n=9), st.data())
    def test_monotone_and_idempotent(self, g, data):
        labels = data.draw(st.lists(st.integers(0, 3), min_size=g.n, max_size=g.n))
        once = local_search(g, labels)
        assert once.score >= quality(g, labels)
        assert once.score == quality(g, once.assignment)
        assert local_search(g, once).score == once.score

    def test_greedy_merge_tie_break(self):
        # all three pairs weigh 1: merge (0, 1) first, then 2 joins
        assert list(greedy_merge(graph_from_upper(3, [1, 1, 1]))) == [0, 0, 0]
        assert list(greedy_merge(graph_from_upper(3, [1, 1, -3]))) == [0, 0, 1]
