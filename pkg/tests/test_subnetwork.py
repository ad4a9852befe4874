import itertools

import numpy as np
import pytest
from conftest import chain_graph, graph_from_upper, int_graphs, k3, unit_star
from hypothesis import given
from hypothesis import strategies as st

from cliquepart.bound import calc_penalty_lp
from cliquepart.graph import WeightedGraph, quality, trivial_upper_bound
from cliquepart.oracle import brute_force_optimum
from cliquepart.subnetwork import (
    Chain,
    InvalidChainError,
    PenaltyModel,
    Star,
    chain_penalty,
    enumerate_chains,
    find_stars,
    is_permissible,
    reduce_chain,
    shortest_positive_path,
)


class TestChainPenalty:
    @pytest.mark.parametrize(
        "path, closing, p", [([3, 5], -2, 2), ([1, 1, 1], -4, 1), ([7, 4, 6], -5, 4)]
    )
    def test_examples(self, path, closing, p):
        assert chain_penalty(path, closing) == p

    @pytest.mark.parametrize("path, closing", [([3, -1], -2), ([3, 5], 2), ([3], -2), ([0, 1], -1)])
    def test_sign_violations(self, path, closing):
        with pytest.raises(InvalidChainError):
            chain_penalty(path, closing)


class TestChain:
    def test_canonical_orientation(self):
        assert Chain((3, 1, 0), 1.0) == Chain((0, 1, 3), 1.0)
        assert Chain((3, 1, 0), 1.0).closing_edge == (0, 3)

    def test_rejects_bad_chains(self):
        with pytest.raises(InvalidChainError):
            Chain((0, 1), 1.0)
        with pytest.raises(InvalidChainError):
            Chain((0, 1, 0), 1.0)
        with pytest.raises(InvalidChainError):
            Chain((0, 1, 2), 0.0)

    def test_signed_edges(self):
        c = Chain((2, 0, 1, 3), 1.5)
        assert c.signed_edges() == [(0, 2, 1), (0, 1, 1), (1, 3, 1), (2, 3, -1)]

    def test_reduce_chain(self):
        g = chain_graph([3, 5], -2)
        c = reduce_chain(g.w, (0, 1, 2))
        assert c.penalty == 2
        red = c.as_graph(3)
        assert red.w[0, 1] == 2 and red.w[1, 2] == 2 and red.w[0, 2] == -2

    def test_reduce_keeps_closing_minimum(self):
        g = chain_graph([4, 6], -3)
        red = reduce_chain(g.w, (0, 1, 2)).as_graph(3)
        assert red.w[0, 2] == -3

    def test_reduction_is_idempotent(self):
        g = chain_graph([7, 4, 6], -5)
        c = reduce_chain(g.w, (0, 1, 2, 3))
        again = reduce_chain(c.as_graph(4).w, c.nodes)
        assert again.penalty == c.penalty == 4


def _brute_chains(g, max_nodes):
    w = g.w
    found = set()
    for k in range(3, max_nodes + 1):
        for seq in itertools.permutations(range(g.n), k):
            if seq[0] > seq[-1]:
                continue
            if w[seq[0], seq[-1]] < 0 and all(w[a, b] > 0 for a, b in itertools.pairwise(seq)):
                found.add(seq)
    return found


class TestEnumerateChains:
    def test_k3(self):
        chains = enumerate_chains(k3())
        assert [c.nodes for c in chains] == [(1, 0, 2)]
        assert chains[0].penalty == 1

    def test_all_positive(self):
        assert enumerate_chains(graph_from_upper(4, [1] * 6)) == []

    def test_four_cycle(self):
        g = chain_graph([1, 1, 1], -1)
        assert [c.nodes for c in enumerate_chains(g, max_nodes=4)] == [(0, 1, 2, 3)]
        assert enumerate_chains(g, max_nodes=3) == []

    @given(int_graphs(min_n=3, max_n=7, q=3), st.sampled_from([3, 4]))
    def test_matches_exhaustive_listing(self, g, k):
        got = [c.nodes for c in enumerate_chains(g, max_nodes=k)]
        assert len(got) == len(set(got))
        assert set(got) == _brute_chains(g, k)

    def test_fixed_excluded_path_edge_blocks_chain(self):
        fix = np.zeros((3, 3), dtype=np.int8)
        fix[0, 1] = fix[1, 0] = -1
        assert enumerate_chains(k3(), fix) == []

    def test_penalty_ignores_fixed_compatible_edges(self):
        g = chain_graph([1, 5], -3)
        fix = np.zeros((3, 3), dtype=np.int8)
        fix[0, 1] = fix[1, 0] = 1
        assert enumerate_chains(g, fix)[0].penalty == 3

    def test_bad_max_nodes(self):
        with pytest.raises(ValueError):
            enumerate_chains(k3(), max_nodes=5)

    @given(int_graphs(min_n=3, max_n=6, q=4))
    def test_resolved_chain_property(self, g):
        for c in enumerate_chains(g):
            red = c.as_graph(g.n)
            assert brute_force_optimum(red)[1] == trivial_upper_bound(red) - c.penalty


class TestShortestPath:
    def test_direct_edge(self):
        assert shortest_positive_path(k3(), None, 0, 1) == [0, 1]

    def test_disconnected(self):
        g = graph_from_upper(4, [1, 0, 0, 0, 0, 1])
        assert shortest_positive_path(g, None, 0, 3) is None

    def test_tie_prefers_smallest_intermediate(self):
        # 0-2-3 and 0-1-3 both 2 hops; 0-3 negative
        g = WeightedGraph.from_edges(
            4, [(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1), (0, 3, -1)]
        )
        assert shortest_positive_path(g, None, 0, 3) == [0, 1, 3]
        assert shortest_positive_path(g, None, 3, 0) == [3, 1, 0]

    def test_max_len_and_blocked(self):
        g = chain_graph([1, 1, 1], -1)
        assert shortest_positive_path(g, None, 0, 3, max_len=2) is None
        assert shortest_positive_path(g, None, 0, 3, max_len=3) == [0, 1, 2, 3]
        assert shortest_positive_path(g, None, 0, 3, blocked=[2]) is None

    def test_respects_residual_and_fixations(self):
        g = chain_graph([1, 1], -1)
        r = g.w.copy()
        r[0, 1] = r[1, 0] = 0
        assert shortest_positive_path(g, r, 0, 2) is None
        fix = np.zeros((3, 3), dtype=np.int8)
        fix[1, 2] = fix[2, 1] = -1
        assert shortest_positive_path(g, None, 0, 2, fixations=fix) is None

    def test_same_endpoint_rejected(self):
        with pytest.raises(ValueError):
            shortest_positive_path(k3(), None, 1, 1)

    @given(int_graphs(min_n=2, max_n=7, q=2), st.data())
    def test_is_minimum_hop(self, g, data):
        u = data.draw(st.integers(0, g.n - 1))
        v = data.draw(st.integers(0, g.n - 1).filter(lambda x: x != u))
        path = shortest_positive_path(g, None, u, v)
        adj = g.w > 0
        dist = {u: 0}
        frontier = [u]
        while frontier:
            nxt = []
            for x in frontier:
                for y in np.flatnonzero(adj[x]):
                    if int(y) not in dist:
                        dist[int(y)] = dist[x] + 1
                        nxt.append(int(y))
            frontier = nxt
        if v not in dist:
            assert path is None
        else:
            assert len(path) - 1 == dist[v]
            assert all(g.w[a, b] > 0 for a, b in itertools.pairwise(path))


class TestStars:
    def test_unit_star(self):
        stars = find_stars(unit_star())
        assert len(stars) == 1
        s = stars[0]
        assert s.hub == 0 and s.terminals == (1, 2, 3) and s.penalty == 2

    def test_no_negative_triangle(self):
        assert find_stars(k3()) == []
        assert find_stars(graph_from_upper(4, [1] * 6)) == []

    def test_two_disjoint_paths_only(self):
        # terminal 3 is reachable from a hub only through another terminal
        edges = [(1, 2, -1), (1, 3, -1), (2, 3, -1), (0, 1, 1), (0, 2, 1), (3, 4, 1), (4, 1, 1)]
        assert find_stars(WeightedGraph.from_edges(5, edges)) == []

    def test_overlapping_paths_rejected(self):
        # from hub 0 the paths to 2 and 3 both pass through 4; hub 4 is fine
        edges = [(1, 2, -1), (1, 3, -1), (2, 3, -1), (0, 1, 1), (0, 4, 1), (4, 2, 1), (4, 3, 1)]
        stars = find_stars(WeightedGraph.from_edges(5, edges))
        assert [s.hub for s in stars] == [4]
        assert stars[0].paths == ((4, 0, 1), (4, 2), (4, 3))

    def test_longer_paths(self):
        # hub 0 -> 4 -> 1, 0 -> 2, 0 -> 5 -> 3
        edges = [(1, 2, -2), (1, 3, -2), (2, 3, -2), (0, 4, 3), (4, 1, 3), (0, 2, 3)]
        edges += [(0, 5, 3), (5, 3, 3)]
        g = WeightedGraph.from_edges(6, edges)
        hubs = {s.hub: s for s in find_stars(g)}
        assert hubs[0].paths == ((0, 4, 1), (0, 2), (0, 5, 3))
        assert hubs[0].penalty == 4

    def test_cap_prefers_large_p(self):
        edges = [(1, 2, -1), (1, 3, -1), (2, 3, -1)]
        edges += [(0, t, 1) for t in (1, 2, 3)] + [(4, t, 1) for t in (1, 2, 3)]
        g = WeightedGraph.from_edges(5, edges)
        assert len(find_stars(g)) == 2
        assert len(find_stars(g, cap=1)) == 1

    def test_star_oracle_property(self):
        rng = np.random.default_rng(11)
        checked = 0
        for _ in range(30):
            g = graph_from_upper(7, rng.integers(-4, 5, size=21))
            for s in find_stars(g):
                red = s.as_graph(g.n)
                assert brute_force_optimum(red)[1] == trivial_upper_bound(red) - s.penalty
                checked += 1
        assert checked > 0

    def test_star_nodes(self):
        s = Star((1, 2, 3), 0, ((0, 4, 1), (0, 2), (0, 3)), 1.0)
        assert s.nodes == (0, 4, 1, 2, 3)
        assert s.magnitude == 1 and s.penalty == 2


class TestPermissibility:
    def test_empty_model(self):
        assert is_permissible(PenaltyModel(), k3())

    def test_single_chain(self):
        m = PenaltyModel()
        m.add(enumerate_chains(k3())[0], 1.0)
        assert is_permissible(m, k3())
        assert m.total_penalty == 1

    def test_shared_edge_over_capacity(self):
        # edge (0,1) weight 2 used by two chains with p = 2
        edges = [(0, 1, 2), (1, 2, 5), (0, 2, -5), (1, 3, 5), (0, 3, -5)]
        g = WeightedGraph.from_edges(4, edges)
        m = PenaltyModel()
        m.add(Chain((0, 1, 2), 2.0), 1.0)
        m.add(Chain((0, 1, 3), 2.0), 1.0)
        assert not is_permissible(m, g)
        half = PenaltyModel()
        half.add(Chain((0, 1, 2), 2.0), 0.5)
        half.add(Chain((0, 1, 3), 2.0), 0.5)
        assert is_permissible(half, g)

    def test_sign_mismatch(self):
        m = PenaltyModel()
        m.add(Chain((0, 1, 2), 1.0), 1.0)  # path 0-1-2, closing (0,2) on a +1 edge
        assert not is_permissible(m, k3())

    def test_negative_multiplier(self):
        with pytest.raises(ValueError):
            PenaltyModel().add(Chain((1, 0, 2), 1.0), -1.0)

    def test_fixed_compatible_edges_exempt(self):
        m = PenaltyModel()
        m.add(Chain((1, 0, 2), 3.0), 1.0)
        fix = np.zeros((3, 3), dtype=np.int8)
        assert not is_permissible(m, k3(), fix)
        fix[0, 1] = fix[1, 0] = fix[0, 2] = fix[2, 0] = 1
        fix[1, 2] = fix[2, 1] = -1
        assert is_permissible(m, k3(), fix)


@given(int_graphs(min_n=3, max_n=7, q=5), st.data())
def test_combined_penalty_caps_every_partition(g, data):
    model = calc_penalty_lp(g).model
    assert is_permissible(model, g)
    ls = WeightedGraph(model.combined_weights(g.n))
    labels = data.draw(st.lists(st.integers(0, g.n - 1), min_size=g.n, max_size=g.n))
    assert quality(ls, labels) <= trivial_upper_bound(ls) - model.total_penalty + 1e-9
